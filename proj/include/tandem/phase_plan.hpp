#pragma once

#include <array>
#include <vector>

#include "tandem/rate_process.hpp"

namespace tandem {

inline constexpr int kNumQueues = 2;

using Vec2 = std::array<double, 2>;

/// Fixed-length light cycles at both intersections. Cycle k of queue i is red
/// on [k*C_i, k*C_i + red_i) and green on [k*C_i + red_i, (k+1)*C_i).
struct PhasePlan {
  Vec2 cycle_length{1.0, 1.0};
  Vec2 red{0.5, 0.5};

  /// Throws std::invalid_argument unless 0 < red_i < C_i.
  void validate() const;
};

enum class SwitchKind { RedStart, GreenStart };

struct SwitchEpoch {
  double epoch;
  SwitchKind kind;
  int queue;

  bool operator==(const SwitchEpoch&) const = default;
};

/// All red and green starts in [0, horizon), sorted by epoch (queue 1 first on ties).
std::vector<SwitchEpoch> build_switch_epochs(const PhasePlan& plan, double horizon);

/// Index k of the light cycle of length `cycle` that contains t, i.e.
/// k*cycle <= t < (k+1)*cycle, robust to rounding of t/cycle.
long long cycle_index(double t, double cycle);

enum class ServiceMode { Constant, Ramp };

/// Service rate during green, as a function of the time elapsed since green
/// started. Zero throughout red.
///
/// In ramp mode each queue carries a staircase b_i over elapsed green time
/// (offset, rate) with nonnegative, nondecreasing rates; beta_max_i is its
/// final rate.
class ServiceProfile {
 public:
  static ServiceProfile constant(double beta_max_1, double beta_max_2);
  static ServiceProfile ramp(std::vector<RateSegment> staircase_1,
                             std::vector<RateSegment> staircase_2);

  ServiceMode mode() const { return mode_; }
  double beta_max(int queue) const { return beta_max_[queue]; }

  /// Service rate after `elapsed` time units of green (right-continuous).
  double green_rate(int queue, double elapsed) const;

  /// Staircase steps of queue `queue` (a single segment in constant mode).
  const std::vector<RateSegment>& staircase(int queue) const { return steps_[queue]; }

  bool operator==(const ServiceProfile&) const = default;

 private:
  ServiceProfile() = default;

  ServiceMode mode_ = ServiceMode::Constant;
  Vec2 beta_max_{0.0, 0.0};
  std::array<std::vector<RateSegment>, 2> steps_;
};

}  // namespace tandem
