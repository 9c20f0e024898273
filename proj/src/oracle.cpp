#include "tandem/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace tandem {

namespace {

using Signature = std::vector<EventRef>;

Signature signature(const TandemTrajectory& traj) {
  Signature sig;
  sig.reserve(traj.events.size());
  for (const auto& e : traj.events) sig.push_back({e.kind, e.source});
  return sig;
}

Vec2 window_average(const TandemTrajectory& traj) {
  return queue_integral(traj, traj.start, traj.end);
}

PiecewiseConstantRate steps(std::vector<RateSegment> segs, double horizon) {
  return PiecewiseConstantRate(std::move(segs), horizon);
}

PiecewiseConstantRate flat(double rate, double horizon) {
  return PiecewiseConstantRate::constant(rate, horizon);
}

FrozenScenario make(std::string name, PiecewiseConstantRate a1, PiecewiseConstantRate a2,
                    double end, std::vector<Vec2> thetas) {
  FrozenScenario s{std::move(name), std::move(a1), std::move(a2), {1.0, 1.0}};
  s.end = end;
  s.thetas = std::move(thetas);
  return s;
}

}  // namespace

TandemTrajectory simulate_frozen(const FrozenScenario& s, const Vec2& theta) {
  TandemSimulator sim(s.arrivals_1, s.arrivals_2_tilde, PhasePlan{s.cycle_length, theta},
                      s.service, s.phi, s.x0, s.start);
  return sim.advance(s.end);
}

FdJacobian fd_jacobian(const FrozenScenario& s, const Vec2& theta, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  for (int j = 0; j < 2; ++j) {
    if (!(theta[j] - h > 0.0 && theta[j] + h < s.cycle_length[j])) {
      throw std::invalid_argument("theta +/- h leaves (0, C)");
    }
  }
  const Signature nominal = signature(simulate_frozen(s, theta));
  FdJacobian fd;
  for (int j = 0; j < 2; ++j) {
    Vec2 up = theta;
    Vec2 down = theta;
    up[j] += h;
    down[j] -= h;
    const TandemTrajectory tu = simulate_frozen(s, up);
    const TandemTrajectory td = simulate_frozen(s, down);
    const Vec2 gu = window_average(tu);
    const Vec2 gd = window_average(td);
    for (int i = 0; i < 2; ++i) fd.value[i][j] = (gu[i] - gd[i]) / (2.0 * h);
    fd.changed[j] = signature(tu) != nominal || signature(td) != nominal;
  }
  return fd;
}

std::vector<GradCheckReport> grad_check(const FrozenScenario& s, const std::vector<Vec2>& thetas,
                                        const GradCheckOptions& opt) {
  std::vector<GradCheckReport> out;
  for (const Vec2& theta : thetas) {
    const IpaResult ipa = estimate_jacobian(simulate_frozen(s, theta), opt.rule);
    const Matrix22 est{{{ipa.jacobian.j11, JacobianEstimate::j12},
                        {ipa.jacobian.j21, ipa.jacobian.j22}}};
    const FdJacobian fd = fd_jacobian(s, theta, opt.h);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        GradCheckReport r;
        r.scenario = s.name;
        r.theta = theta;
        r.row = i;
        r.col = j;
        r.ipa = est[i][j];
        r.fd = fd.value[i][j];
        r.abs_error = std::abs(r.ipa - r.fd);
        r.rel_error = r.abs_error / std::max(std::abs(r.fd), 1e-9);
        r.flagged = fd.changed[j];
        r.pass = r.flagged || r.rel_error <= opt.rel_tol;
        r.emptying_triggered_starts = ipa.emptying_triggered_starts;
        out.push_back(r);
      }
    }
  }
  return out;
}

std::vector<GradCheckReport> grad_check(const FrozenScenario& s, const GradCheckOptions& opt) {
  return grad_check(s, s.thetas, opt);
}

std::vector<FrozenScenario> deterministic_suite() {
  std::vector<FrozenScenario> v;

  v.push_back(make("s0", flat(2.0, 1.0), flat(0.0, 1.0), 1.0, {{0.4, 0.4}}));
  v.push_back(make("s1", flat(2.0, 1.0), flat(0.0, 1.0), 1.0, {{0.4, 0.6}}));
  v.push_back(make("s1-wide", flat(2.0, 1.6), flat(0.0, 1.6), 1.6, {{0.3, 0.7}}));
  v.push_back(make("q2-every-cycle", flat(2.0, 3.5), flat(0.0, 3.5), 3.5, {{0.2, 0.7}}));
  v.push_back(make("q1-overloaded", flat(4.0, 3.3), flat(0.0, 3.3), 3.3, {{0.5, 0.55}}));
  v.push_back(make("q1-overloaded-short-red", flat(4.0, 3.37), flat(0.0, 3.37), 3.37, {{0.3, 0.45}}));
  v.push_back(make("q1-empties-in-green", flat(3.0, 2.7), flat(0.0, 2.7), 2.7, {{0.35, 0.5}}));
  v.push_back(make("q1-carries-over", flat(3.6, 3.2), flat(0.0, 3.2), 3.2, {{0.45, 0.3}}));

  const std::vector<RateSegment> bursts{{0.0, 1.5}, {0.7, 4.5}, {1.9, 0.8}, {2.6, 3.0}};
  v.push_back(make("alpha1-bursts", steps(bursts, 3.45), flat(0.0, 3.45), 3.45, {{0.4, 0.55}}));
  v.push_back(make("alpha1-bursts-b", steps(bursts, 3.45), flat(0.0, 3.45), 3.45, {{0.25, 0.72}}));

  {
    const std::vector<RateSegment> noise{{0.0, 0.3}, {0.93, 1.2}, {1.63, 0.0}};
    auto s = make("alpha2-noise", flat(2.5, 2.8), steps(noise, 2.8), 2.8, {{0.45, 0.35}});
    s.phi = 0.9;
    v.push_back(s);
    s.name = "alpha2-noise-b";
    s.thetas = {{0.6, 0.62}};
    v.push_back(s);
  }
  {
    auto s = make("unequal-cycles", flat(2.2, 3.9), flat(0.4, 3.9), 3.9, {{0.4, 0.5}});
    s.cycle_length = {1.0, 1.3};
    s.phi = 0.9;
    v.push_back(s);
    s.name = "unequal-cycles-b";
    s.cycle_length = {0.8, 1.3};
    s.end = 4.1;
    s.arrivals_1 = flat(2.2, 4.1);
    s.arrivals_2_tilde = flat(0.4, 4.1);
    s.thetas = {{0.3, 0.75}};
    v.push_back(s);
  }
  {
    auto s = make("initial-contents", flat(2.0, 2.5), flat(0.0, 2.5), 2.5, {{0.4, 0.6}});
    s.x0 = {1.2, 0.7};
    v.push_back(s);
  }
  {
    auto s = make("late-start-red", flat(2.4, 2.85), flat(0.0, 2.85), 2.85, {{0.4, 0.5}});
    s.start = 0.25;
    s.x0 = {0.3, 0.2};
    v.push_back(s);
    s.name = "late-start-green";
    s.start = 0.55;
    s.end = 2.9;
    s.arrivals_1 = flat(2.4, 2.9);
    s.arrivals_2_tilde = flat(0.0, 2.9);
    s.x0 = {0.5, 0.1};
    s.thetas = {{0.4, 0.3}};
    v.push_back(s);
  }
  {
    const std::vector<RateSegment> stair{{0.0, 2.5}, {0.05, 3.5}, {0.1, 5.0}};
    auto s = make("ramp", flat(2.0, 2.53), flat(0.0, 2.53), 2.53, {{0.4, 0.6}});
    s.service = ServiceProfile::ramp(stair, stair);
    v.push_back(s);
    s.name = "ramp-heavy";
    s.end = 3.3;
    s.arrivals_1 = flat(3.0, 3.3);
    s.arrivals_2_tilde = flat(0.0, 3.3);
    s.thetas = {{0.35, 0.48}};
    v.push_back(s);
    const std::vector<RateSegment> from_zero{{0.0, 0.0}, {0.04, 2.5}, {0.08, 5.0}};
    s.name = "ramp-from-zero";
    s.service = ServiceProfile::ramp(from_zero, from_zero);
    s.end = 2.4;
    s.arrivals_1 = flat(2.0, 2.4);
    s.arrivals_2_tilde = flat(0.0, 2.4);
    s.thetas = {{0.3, 0.5}};
    v.push_back(s);
  }
  {
    auto s = make("half-merge", flat(3.0, 2.6), flat(1.0, 2.6), 2.6, {{0.5, 0.37}});
    s.phi = 0.5;
    v.push_back(s);
  }
  v.push_back(make("zero-input", flat(0.0, 2.0), flat(0.0, 2.0), 2.0, {{0.4, 0.6}}));
  v.push_back(make("q2-exogenous-only", flat(0.0, 2.3), flat(3.0, 2.3), 2.3, {{0.4, 0.5}}));
  return v;
}

std::vector<FrozenScenario> stochastic_suite(const ExperimentConfig& cfg, int count, int points) {
  cfg.validate();
  const double horizon = cfg.control_period();
  std::vector<FrozenScenario> v;
  for (int r = 0; r < count; ++r) {
    const auto rep = static_cast<std::uint32_t>(r);
    ArrivalRealization a = generate_arrivals(cfg, rep, horizon);
    FrozenScenario s{"stochastic-" + std::to_string(r), std::move(a.alpha1),
                     std::move(a.alpha2_tilde), cfg.cycle_length};
    s.service = cfg.service();
    s.phi = cfg.phi;
    s.end = horizon;
    RandomStream rng({cfg.seed, rep, 2});
    for (int p = 0; p < points; ++p) {
      Vec2 theta;
      for (int i = 0; i < 2; ++i) {
        theta[i] = rng.uniform(0.1 * cfg.cycle_length[i], 0.9 * cfg.cycle_length[i]);
      }
      s.thetas.push_back(theta);
    }
    v.push_back(std::move(s));
  }
  return v;
}

}  // namespace tandem
