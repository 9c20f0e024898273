#pragma once

#include <span>

#include "tandem/event.hpp"
#include "tandem/simulator.hpp"

namespace tandem {

/// Running d x_i / d theta_i for one queue, driven by that queue's events.
///
/// While the queue is busy the value is
///   (sum of beta_i just before each cycle start since the busy period began)
///   + beta_i(now) - beta_i(busy start+),
/// and it is 0 while the queue is empty. A control-cycle boundary restarts
/// the bookkeeping as if the busy period began there, because the state at
/// the boundary does not depend on the red durations applied after it.
class DiagIpaAccumulator {
 public:
  explicit DiagIpaAccumulator(int queue);

  /// Integrates the current value up to the event epoch, then applies the event.
  void on_event(const Event& ev);

  /// Integrates the current value up to t without applying an event.
  void integrate_to(double t);

  double value() const;
  double running_integral() const { return integral_; }
  int queue() const { return queue_; }
  bool busy() const { return busy_; }

 private:
  int queue_;
  bool started_ = false;
  bool busy_ = false;
  double cycle_sum_ = 0.0;
  double base_rate_ = 0.0;
  double current_rate_ = 0.0;
  double integral_ = 0.0;
  double last_epoch_ = 0.0;
};

/// How a busy period of the first queue ending inside a busy period of the
/// second queue is treated.
enum class CrossRule {
  /// The released perturbation phi * (d x_1 / d theta_1)(tau_e-) is added
  /// when the first queue empties. Agrees with finite differences.
  ReleasedPerturbation,
  /// Keep d x_2 / d theta_1 unchanged through the first queue's empty
  /// periods. Biased; kept as a negative control for the gradient checker.
  IgnoreRelease,
};

/// Running d x_2 / d theta_1.
class CrossIpaAccumulator {
 public:
  explicit CrossIpaAccumulator(CrossRule rule = CrossRule::ReleasedPerturbation);

  /// `diag1` must be the first queue's accumulator before it has seen `ev`.
  void on_event(const Event& ev, const DiagIpaAccumulator& diag1, double phi);
  void integrate_to(double t);

  double value() const { return value_; }
  double running_integral() const { return integral_; }

  /// Busy starts of the second queue triggered by the first queue emptying.
  /// Not expected under piecewise-constant rates; counted for diagnostics.
  int emptying_triggered_starts() const { return emptying_triggered_; }

 private:
  CrossRule rule_;
  bool started_ = false;
  bool busy2_ = false;
  double value_ = 0.0;
  double integral_ = 0.0;
  double last_epoch_ = 0.0;
  double release_epoch_ = -1.0;
  double release_sensitivity_ = 0.0;
  int emptying_triggered_ = 0;
};

/// Lower-triangular Jacobian of the windowed queue averages with respect to
/// the red durations.
struct JacobianEstimate {
  double j11 = 0.0;
  double j21 = 0.0;
  double j22 = 0.0;
  double window = 0.0;

  static constexpr double j12 = 0.0;
};

JacobianEstimate assemble_jacobian(const DiagIpaAccumulator& diag1,
                                   const DiagIpaAccumulator& diag2,
                                   const CrossIpaAccumulator& cross, double window);

/// Evaluates d x_i / d theta_i at t directly from the log (right limit at an
/// event epoch): finds the start of the busy period containing t and sums the
/// pre-switch service rates of the cycle starts after it.
double diag_closed_form(double t, std::span<const Event> log, int queue);

struct IpaResult {
  JacobianEstimate jacobian;
  int emptying_triggered_starts = 0;
};

/// Runs all three accumulators over one simulated window.
IpaResult estimate_jacobian(const TandemTrajectory& traj,
                            CrossRule rule = CrossRule::ReleasedPerturbation);

}  // namespace tandem
