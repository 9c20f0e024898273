#pragma once

#include <array>
#include <string>
#include <vector>

#include "tandem/ipa.hpp"
#include "tandem/scenario.hpp"
#include "tandem/simulator.hpp"

namespace tandem {

/// Fixed inputs for gradient checks: arrival realizations, phase lengths,
/// service and initial state, plus the red durations to probe. Only the red
/// durations change between the perturbed runs.
struct FrozenScenario {
  std::string name;
  PiecewiseConstantRate arrivals_1;
  PiecewiseConstantRate arrivals_2_tilde;
  Vec2 cycle_length{1.0, 1.0};
  ServiceProfile service = ServiceProfile::constant(5.0, 5.0);
  double phi = 1.0;
  Vec2 x0{0.0, 0.0};
  double start = 0.0;
  double end = 1.0;
  std::vector<Vec2> thetas{};
};

/// Simulates [start, end) of the scenario with red durations `theta`.
TandemTrajectory simulate_frozen(const FrozenScenario& s, const Vec2& theta);

using Matrix22 = std::array<std::array<double, 2>, 2>;

/// Central differences of the window averages G. `changed[j]` is set when the
/// runs at theta +/- h e_j do not share the nominal event sequence (kind and
/// source), i.e. the perturbation crosses an event-order change.
struct FdJacobian {
  Matrix22 value{};
  std::array<bool, 2> changed{false, false};
};

/// Throws std::invalid_argument for h <= 0 or theta +/- h outside (0, C).
FdJacobian fd_jacobian(const FrozenScenario& s, const Vec2& theta, double h);

/// One Jacobian entry at one probe point.
struct GradCheckReport {
  std::string scenario;
  Vec2 theta{0.0, 0.0};
  int row = 0;  // 0-based (i, j) of dG_i / d theta_j
  int col = 0;
  double ipa = 0.0;
  double fd = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;  // |ipa - fd| / max(|fd|, 1e-9)
  bool flagged = false;
  bool pass = false;  // flagged entries always pass
  int emptying_triggered_starts = 0;
};

struct GradCheckOptions {
  double h = 1e-3;
  double rel_tol = 1e-6;
  CrossRule rule = CrossRule::ReleasedPerturbation;
};

/// Four reports per theta in (1,1), (1,2), (2,1), (2,2) order.
std::vector<GradCheckReport> grad_check(const FrozenScenario& s, const std::vector<Vec2>& thetas,
                                        const GradCheckOptions& opt);
std::vector<GradCheckReport> grad_check(const FrozenScenario& s, const GradCheckOptions& opt);

/// Hand-built piecewise-constant scenarios with exact FD behaviour.
std::vector<FrozenScenario> deterministic_suite();

/// `count` control windows of cfg's arrival processes (replications
/// 0..count-1), each probed at `points` red-duration pairs drawn uniformly
/// from [0.1 C_i, 0.9 C_i].
std::vector<FrozenScenario> stochastic_suite(const ExperimentConfig& cfg, int count, int points = 10);

/// Default tolerances of the two suites.
inline constexpr GradCheckOptions kDeterministicCheck{1e-3, 1e-6, CrossRule::ReleasedPerturbation};
inline constexpr GradCheckOptions kStochasticCheck{1e-5, 1e-3, CrossRule::ReleasedPerturbation};

}  // namespace tandem
