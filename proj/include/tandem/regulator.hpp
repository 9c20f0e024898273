#pragma once

#include <array>
#include <functional>
#include <string_view>
#include <vector>

#include "tandem/ipa.hpp"
#include "tandem/phase_plan.hpp"

namespace tandem {

struct Matrix2 {
  std::array<Vec2, 2> m{Vec2{0.0, 0.0}, Vec2{0.0, 0.0}};

  static Matrix2 identity() { return {{Vec2{1.0, 0.0}, Vec2{0.0, 1.0}}}; }
  static Matrix2 diagonal(double a, double b) { return {{Vec2{a, 0.0}, Vec2{0.0, b}}}; }

  double operator()(int r, int c) const { return m[r][c]; }
  Vec2 operator*(const Vec2& v) const {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
  }
  bool operator==(const Matrix2&) const = default;
};

enum class RegulationMode { Centralized, Decentralized };

std::string_view to_string(RegulationMode mode);
RegulationMode parse_mode(std::string_view text);

/// Safety limits around the Newton step.
struct GuardConfig {
  double epsilon_j = 1e-3;  // smallest usable |diagonal Jacobian entry|
  Vec2 step_cap{0.25, 0.25};
  Vec2 theta_min{0.02, 0.02};
  Vec2 theta_max{0.98, 0.98};

  /// Limits as fractions of the light-cycle lengths.
  static GuardConfig for_cycles(const Vec2& cycle_length, double epsilon_j = 1e-3,
                                double step_cap_fraction = 0.25, double min_fraction = 0.02,
                                double max_fraction = 0.98);

  void validate() const;
};

struct ControllerState {
  Vec2 theta{0.0, 0.0};
  Vec2 y{0.0, 0.0};
  Vec2 e{0.0, 0.0};
  Matrix2 gain = Matrix2::identity();
  RegulationMode mode = RegulationMode::Centralized;
  int k = 0;
};

/// Gain for the next control cycle: the inverse of the lower-triangular
/// Jacobian (centralized) or of its diagonal (decentralized). A row whose
/// pivot is smaller than epsilon_j is copied from `prev_gain`; in centralized
/// mode the second row also depends on j11.
Matrix2 invert_gain(const JacobianEstimate& jac, const Matrix2& prev_gain, RegulationMode mode,
                    const GuardConfig& guards);

/// theta_k = clamp(theta_{k-1} + cap(A e_{k-1})). The cap scales the whole
/// step so no component exceeds its step_cap, keeping its direction.
ControllerState control_step(const ControllerState& state, const Matrix2& gain,
                             const GuardConfig& guards);

struct PlantResponse {
  Vec2 output{0.0, 0.0};
  JacobianEstimate jacobian;
};

/// Acts on the control vector for control cycle k and reports the measured
/// output with its Jacobian estimate.
using Plant = std::function<PlantResponse(int k, const Vec2& theta)>;

struct LoopSettings {
  Vec2 reference{0.1, 0.1};
  Vec2 theta_init{0.8, 0.8};
  Matrix2 initial_gain = Matrix2::identity();
  RegulationMode mode = RegulationMode::Centralized;
  GuardConfig guards;
  int num_cycles = 50;
};

struct CycleRecord {
  int k = 0;
  Vec2 theta{0.0, 0.0};
  Vec2 y{0.0, 0.0};
  Vec2 e{0.0, 0.0};
  JacobianEstimate jacobian;
  Matrix2 gain;  // gain that produced theta (initial gain for k = 1)
};

/// Control cycles k = 1..num_cycles: the gain built from the previous
/// cycle's Jacobian sets theta_k, the plant runs, and the error is measured.
std::vector<CycleRecord> run_closed_loop(const LoopSettings& settings, const Plant& plant);

}  // namespace tandem
