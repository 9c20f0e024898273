#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tandem/event.hpp"
#include "tandem/phase_plan.hpp"
#include "tandem/rate_process.hpp"

namespace tandem {

/// Queue contents at one epoch. Bit i of `knots` is set when queue i's path
/// may change slope here; between knots of queue i, x_i is linear.
struct Breakpoint {
  double epoch;
  Vec2 x;
  std::uint8_t knots;

  bool is_knot(int queue) const { return (knots >> queue) & 1u; }
  bool operator==(const Breakpoint&) const = default;
};

/// Piecewise-linear queue paths over [start, end) with the event log that
/// produced them. Immutable once returned by the simulator.
struct TandemTrajectory {
  double start = 0.0;
  double end = 0.0;
  double phi = 1.0;
  std::vector<Breakpoint> breakpoints;
  std::vector<Event> events;

  /// Queue contents at time t in [start, end], by linear interpolation.
  Vec2 contents_at(double t) const;
};

/// delta_1: service rate while the first queue is busy, its inflow when empty.
double outflow_rate(double x1, double alpha1, double beta1);

/// alpha_2 = phi * delta_1 + alpha2_tilde.
double merge_inflow(double delta1, double alpha2_tilde, double phi);

/// Exact time averages of x_1 and x_2 over [t_a, t_b), which must lie inside
/// the trajectory. Throws std::invalid_argument on an empty window.
Vec2 queue_integral(const TandemTrajectory& traj, double t_a, double t_b);

/// Event-driven fluid simulation of the two queues in tandem.
///
/// All rates are piecewise constant, so the queue paths are piecewise linear
/// and every epoch (including when a queue empties) is computed in closed
/// form. The simulator keeps its state between calls to advance(), so a long
/// run can be cut into control windows, each with its own red durations.
///
/// The arrival processes are referenced, not copied, and must outlive the
/// simulator.
class TandemSimulator {
 public:
  TandemSimulator(const PiecewiseConstantRate& arrivals_1,
                  const PiecewiseConstantRate& arrivals_2_tilde, const PhasePlan& plan,
                  const ServiceProfile& service, double phi, Vec2 x0, double start = 0.0);

  /// New red durations, applied at the start of the next advance() call.
  void set_red(const Vec2& red);

  /// Simulates [now(), end) and returns that window. The window log starts
  /// with a ControlCycleBoundary event at now().
  TandemTrajectory advance(double end);

  double now() const { return now_; }
  Vec2 contents() const;
  const PhasePlan& plan() const { return plan_; }

 private:
  struct Light {
    long long cycle = 0;
    bool green = false;
    double green_start = 0.0;
    std::size_t step = 0;
  };
  struct Fluid {
    double anchor_t = 0.0;
    double anchor_x = 0.0;
    double slope = 0.0;
    bool busy = false;
    double empty_time = 0.0;
  };

  void init_lights(double t);
  void init_exogenous(double t);
  double next_switch(int queue) const;
  double next_step(int queue) const;
  double next_jump(int process) const;
  double position(int queue, double t) const;
  RateSnapshot current_rates() const;

  // Applies the rate changes described by `primary` at epoch t, resolves
  // empty/busy transitions and appends the epoch's events.
  void settle(double t, std::vector<Event> primary, const RateSnapshot& before,
              TandemTrajectory& out);

  const PiecewiseConstantRate* arrivals_[2];
  PhasePlan plan_;
  ServiceProfile service_;
  double phi_;
  double now_;
  std::optional<Vec2> pending_red_;
  std::array<Light, 2> light_{};
  std::array<std::size_t, 2> segment_{};
  std::array<double, 2> exogenous_{};
  std::array<Fluid, 2> fluid_{};
};

/// One-shot simulation of [0, horizon) from initial contents x0.
TandemTrajectory simulate(const PiecewiseConstantRate& arrivals_1,
                          const PiecewiseConstantRate& arrivals_2_tilde, const PhasePlan& plan,
                          const ServiceProfile& service, double phi, Vec2 x0, double horizon);

}  // namespace tandem
