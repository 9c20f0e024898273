#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tandem/ipa.hpp"
#include "tandem/oracle.hpp"
#include "tandem/regulator.hpp"
#include "tandem/simulator.hpp"

namespace tandem::testing {

/// S0: C=(1,1), alpha_1 = 2, alpha2_tilde = 0, phi = 1, beta_max = 5, over [0, horizon).
FrozenScenario s0(Vec2 theta = {0.4, 0.4}, double horizon = 1.0);
/// S1: S0 with theta = (0.4, 0.6).
FrozenScenario s1(double horizon = 1.0);

/// A random but valid tandem setup: cycle lengths, red durations, on/off or
/// hand-drawn arrival steps, phi, constant or ramp service, initial contents
/// and a horizon of a few cycles.
struct RandomCase {
  FrozenScenario scenario;
  Vec2 theta;
  std::uint64_t seed;
};

RandomCase random_case(std::uint64_t seed);

/// Accumulator states after every event with epoch <= t (right limits at t).
struct IpaSnapshot {
  double diag1;
  double diag2;
  double cross;
};
IpaSnapshot ipa_at(const TandemTrajectory& traj, double t,
                   CrossRule rule = CrossRule::ReleasedPerturbation);

// Each check returns an empty string on success, otherwise a description of
// the first violation.
std::string check_nonnegative(const TandemTrajectory& traj);
std::string check_slopes(const TandemTrajectory& traj);
std::string check_conservation(const FrozenScenario& s, const TandemTrajectory& traj);
std::string check_red_service(const FrozenScenario& s, const Vec2& theta,
                              const TandemTrajectory& traj);
std::string check_split(const FrozenScenario& s, const Vec2& theta, double split);
std::string check_determinism(const FrozenScenario& s, const Vec2& theta);
std::string check_closed_form(const TandemTrajectory& traj, std::uint64_t seed, int samples);
std::string check_quantization(const FrozenScenario& s, const TandemTrajectory& traj);
std::string check_reset_on_empty(const TandemTrajectory& traj);
std::string check_integral_additivity(const TandemTrajectory& traj, double split);

std::string check_gain_inverse(const JacobianEstimate& j);
std::string check_theta_box(std::uint64_t seed);

/// Runs every trajectory and IPA check above on random_case(seed).
std::string check_random_case(std::uint64_t seed);

/// Synthetic smooth plant with lower-triangular Jacobian.
Vec2 synthetic_plant(const Vec2& u);
JacobianEstimate synthetic_jacobian(const Vec2& u);

/// Largest |difference| between the regulator's iterates and a direct
/// Newton-Raphson iteration on the synthetic plant over `steps` steps.
double newton_discrepancy(int steps);

}  // namespace tandem::testing
