#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tandem::testing {

namespace {

std::string at(const char* what, double t) {
  std::ostringstream s;
  s.precision(17);
  s << what << " at t=" << t;
  return s.str();
}

bool is_red(const Vec2& cycle, const Vec2& theta, int q, double t) {
  const long long k = cycle_index(t, cycle[q]);
  return t < static_cast<double>(k) * cycle[q] + theta[q];
}

// Index of the last event with epoch <= t, or -1.
long last_event_at_or_before(const std::vector<Event>& log, double t) {
  long j = -1;
  for (std::size_t i = 0; i < log.size() && log[i].epoch <= t; ++i) j = static_cast<long>(i);
  return j;
}

}  // namespace

FrozenScenario s0(Vec2 theta, double horizon) {
  FrozenScenario s{"s0", PiecewiseConstantRate::constant(2.0, horizon),
                   PiecewiseConstantRate::constant(0.0, horizon)};
  s.phi = 1.0;
  s.end = horizon;
  s.thetas = {theta};
  return s;
}

FrozenScenario s1(double horizon) {
  FrozenScenario s = s0({0.4, 0.6}, horizon);
  s.name = "s1";
  return s;
}

RandomCase random_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto coin = [&](double p) { return u(0.0, 1.0) < p; };

  Vec2 cycle{u(0.6, 1.5), coin(0.5) ? 0.0 : u(0.6, 1.5)};
  if (cycle[1] == 0.0) cycle[1] = cycle[0];
  const double horizon = u(2.0, 6.0) * std::max(cycle[0], cycle[1]);
  const Vec2 theta{u(0.1, 0.9) * cycle[0], u(0.1, 0.9) * cycle[1]};
  const double beta1 = u(2.0, 8.0);
  const double beta2 = u(2.0, 8.0);

  auto arrivals = [&](double mean) {
    if (coin(0.5)) {
      OnOffSpec spec{mean, u(0.0, 0.5), u(0.01, 0.1), u(0.02, 0.2)};
      return gen_onoff(spec, {seed, 0, static_cast<std::uint32_t>(rng() & 0xff)}, horizon);
    }
    std::vector<RateSegment> segs{{0.0, u(0.0, 2.0 * mean)}};
    for (double t = u(0.05, 0.8); t < horizon; t += u(0.05, 0.8)) segs.push_back({t, u(0.0, 2.0 * mean)});
    return PiecewiseConstantRate(std::move(segs), horizon);
  };

  FrozenScenario s{"random-" + std::to_string(seed), arrivals(u(0.5, 1.2) * beta1 * 0.5),
                   arrivals(u(0.0, 1.0))};
  s.cycle_length = cycle;
  s.phi = coin(0.2) ? 1.0 : u(0.0, 1.0);
  if (coin(0.3)) {
    auto stair = [&](double top) {
      std::vector<RateSegment> st{{0.0, coin(0.3) ? 0.0 : u(0.2, 0.6) * top}};
      const int n = 1 + static_cast<int>(rng() % 3);
      double off = 0.0;
      for (int j = 1; j <= n; ++j) {
        off += u(0.01, 0.06);
        st.push_back({off, j == n ? top : std::max(st.back().rate, u(0.3, 1.0) * top)});
      }
      return st;
    };
    s.service = ServiceProfile::ramp(stair(beta1), stair(beta2));
  } else {
    s.service = ServiceProfile::constant(beta1, beta2);
  }
  if (coin(0.3)) s.x0 = {u(0.0, 2.0), u(0.0, 2.0)};
  s.end = horizon;
  s.thetas = {theta};
  return {std::move(s), theta, seed};
}

IpaSnapshot ipa_at(const TandemTrajectory& traj, double t, CrossRule rule) {
  DiagIpaAccumulator d1(0), d2(1);
  CrossIpaAccumulator cross(rule);
  for (const auto& ev : traj.events) {
    if (ev.epoch > t) break;
    cross.on_event(ev, d1, traj.phi);
    d1.on_event(ev);
    d2.on_event(ev);
  }
  return {d1.value(), d2.value(), cross.value()};
}

std::string check_nonnegative(const TandemTrajectory& traj) {
  for (const auto& b : traj.breakpoints) {
    if (!(b.x[0] >= 0.0 && b.x[1] >= 0.0)) return at("negative queue content", b.epoch);
  }
  return {};
}

std::string check_slopes(const TandemTrajectory& traj) {
  const auto& bp = traj.breakpoints;
  for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
    const double dt = bp[j + 1].epoch - bp[j].epoch;
    if (dt < 0.0) return at("breakpoints out of order", bp[j].epoch);
    if (dt == 0.0) {
      if (bp[j].x != bp[j + 1].x) return at("discontinuous queue path", bp[j].epoch);
      continue;
    }
    const long e = last_event_at_or_before(traj.events, bp[j].epoch);
    if (e < 0) return at("breakpoint before the first event", bp[j].epoch);
    const Event& ev = traj.events[static_cast<std::size_t>(e)];
    for (int q = 0; q < 2; ++q) {
      const double slope = ev.busy_after[q] ? ev.after.net_rate(q) : 0.0;
      const double expect = bp[j].x[q] + slope * dt;
      if (std::abs(bp[j + 1].x[q] - expect) > 1e-9 * (1.0 + std::abs(expect))) {
        return at("slope differs from inflow - outflow", bp[j].epoch);
      }
      if (!ev.busy_after[q] && ev.after.inflow(q) > ev.after.beta[q]) {
        return at("empty queue with inflow above service", bp[j].epoch);
      }
    }
  }
  return {};
}

std::string check_conservation(const FrozenScenario& s, const TandemTrajectory& traj) {
  // Inflow to queue 1 straight from the arrival process; outflows and the
  // second queue's inflow from the log annotations.
  double in1 = 0.0;
  const auto segs = s.arrivals_1.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double hi = i + 1 < segs.size() ? segs[i + 1].start : s.arrivals_1.horizon();
    const double a = std::max(segs[i].start, traj.start);
    const double b = std::min(hi, traj.end);
    if (b > a) in1 += segs[i].rate * (b - a);
  }
  double out1 = 0.0, in2 = 0.0, out2 = 0.0;
  for (std::size_t j = 0; j < traj.events.size(); ++j) {
    const Event& ev = traj.events[j];
    const double next = j + 1 < traj.events.size() ? traj.events[j + 1].epoch : traj.end;
    const double dt = next - ev.epoch;
    if (dt <= 0.0) continue;
    out1 += ev.after.delta1 * dt;
    in2 += ev.after.alpha2 * dt;
    out2 += (ev.busy_after[1] ? ev.after.beta[1] : ev.after.alpha2) * dt;
  }
  const Vec2 x0 = traj.breakpoints.front().x;
  const Vec2 x1 = traj.breakpoints.back().x;
  const double tol = 1e-9 * (1.0 + in1 + in2);
  if (std::abs((x1[0] - x0[0]) - (in1 - out1)) > tol) return "queue 1 does not conserve fluid";
  if (std::abs((x1[1] - x0[1]) - (in2 - out2)) > tol) return "queue 2 does not conserve fluid";
  return {};
}

std::string check_red_service(const FrozenScenario& s, const Vec2& theta,
                              const TandemTrajectory& traj) {
  for (std::size_t j = 0; j < traj.events.size(); ++j) {
    const Event& ev = traj.events[j];
    // Coincident events: only the state after the last one is in force.
    if (j + 1 < traj.events.size() && traj.events[j + 1].epoch == ev.epoch) continue;
    for (int q = 0; q < 2; ++q) {
      const bool red = is_red(s.cycle_length, theta, q, ev.epoch);
      if (red && ev.after.beta[q] != 0.0) return at("service during red", ev.epoch);
      if (!red && s.service.mode() == ServiceMode::Constant &&
          ev.after.beta[q] != s.service.beta_max(q)) {
        return at("green service differs from beta_max", ev.epoch);
      }
    }
  }
  return {};
}

std::string check_split(const FrozenScenario& s, const Vec2& theta, double split) {
  TandemSimulator one(s.arrivals_1, s.arrivals_2_tilde, PhasePlan{s.cycle_length, theta},
                      s.service, s.phi, s.x0, s.start);
  const TandemTrajectory whole = one.advance(s.end);
  TandemSimulator two(s.arrivals_1, s.arrivals_2_tilde, PhasePlan{s.cycle_length, theta},
                      s.service, s.phi, s.x0, s.start);
  TandemTrajectory a = two.advance(split);
  const TandemTrajectory b = two.advance(s.end);

  auto strip = [split](std::vector<Breakpoint> v) {
    std::vector<std::pair<double, Vec2>> out;
    for (const auto& p : v) {
      if (p.epoch != split) out.push_back({p.epoch, p.x});
    }
    return out;
  };
  std::vector<Breakpoint> joined = a.breakpoints;
  joined.insert(joined.end(), b.breakpoints.begin(), b.breakpoints.end());
  if (strip(joined) != strip(whole.breakpoints)) return at("split run differs", split);
  if (a.breakpoints.back().x != b.breakpoints.front().x) return at("split run jumps", split);
  if (whole.contents_at(split) != a.breakpoints.back().x) {
    // Interpolated and simulated positions may round differently; allow 1 ulp-ish.
    const Vec2 w = whole.contents_at(split);
    const Vec2 x = a.breakpoints.back().x;
    for (int q = 0; q < 2; ++q) {
      if (std::abs(w[q] - x[q]) > 1e-12 * (1.0 + std::abs(x[q]))) return at("split contents differ", split);
    }
  }
  return {};
}

std::string check_determinism(const FrozenScenario& s, const Vec2& theta) {
  const TandemTrajectory a = simulate_frozen(s, theta);
  const TandemTrajectory b = simulate_frozen(s, theta);
  if (a.breakpoints != b.breakpoints || a.events != b.events) return "repeated run differs";
  return {};
}

std::string check_closed_form(const TandemTrajectory& traj, std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick(traj.start, traj.end);
  std::vector<double> times(static_cast<std::size_t>(samples));
  for (auto& t : times) t = pick(rng);
  // Event epochs themselves are the interesting cases.
  for (std::size_t j = 0; j < traj.events.size() && j < times.size() / 4; ++j) {
    times[j] = traj.events[j * traj.events.size() / (times.size() / 4)].epoch;
  }
  for (double t : times) {
    const IpaSnapshot snap = ipa_at(traj, t);
    for (int q = 0; q < 2; ++q) {
      const double closed = diag_closed_form(t, traj.events, q);
      if (closed != (q == 0 ? snap.diag1 : snap.diag2)) return at("closed form differs from accumulator", t);
    }
  }
  return {};
}

std::string check_quantization(const FrozenScenario& s, const TandemTrajectory& traj) {
  if (s.service.mode() != ServiceMode::Constant) return {};
  for (const auto& ev : traj.events) {
    const IpaSnapshot snap = ipa_at(traj, ev.epoch);
    for (int q = 0; q < 2; ++q) {
      const double v = q == 0 ? snap.diag1 : snap.diag2;
      const double m = v / s.service.beta_max(q);
      if (v < 0.0 || std::abs(m - std::round(m)) > 1e-12 * (1.0 + m)) {
        return at("diagonal value not a multiple of beta_max", ev.epoch);
      }
    }
  }
  return {};
}

std::string check_reset_on_empty(const TandemTrajectory& traj) {
  for (const auto& ev : traj.events) {
    const IpaSnapshot snap = ipa_at(traj, ev.epoch);
    if (!ev.busy_after[0] && snap.diag1 != 0.0) return at("queue 1 derivative nonzero while empty", ev.epoch);
    if (!ev.busy_after[1] && (snap.diag2 != 0.0 || snap.cross != 0.0)) {
      return at("queue 2 derivatives nonzero while empty", ev.epoch);
    }
  }
  return {};
}

std::string check_integral_additivity(const TandemTrajectory& traj, double split) {
  DiagIpaAccumulator d1(0), d2(1);
  CrossIpaAccumulator cross;
  auto feed = [&](const Event& ev) {
    cross.on_event(ev, d1, traj.phi);
    d1.on_event(ev);
    d2.on_event(ev);
  };
  std::size_t j = 0;
  for (; j < traj.events.size() && traj.events[j].epoch <= split; ++j) feed(traj.events[j]);
  d1.integrate_to(split);
  d2.integrate_to(split);
  cross.integrate_to(split);
  const double first[3] = {d1.running_integral(), d2.running_integral(), cross.running_integral()};

  // Second half by hand from the right-limit values.
  double second[3] = {0.0, 0.0, 0.0};
  double last = split;
  IpaSnapshot v = ipa_at(traj, split);
  for (; j <= traj.events.size(); ++j) {
    const double t = j < traj.events.size() ? traj.events[j].epoch : traj.end;
    second[0] += v.diag1 * (t - last);
    second[1] += v.diag2 * (t - last);
    second[2] += v.cross * (t - last);
    last = t;
    if (j < traj.events.size()) {
      feed(traj.events[j]);
      v = {d1.value(), d2.value(), cross.value()};
    }
  }
  d1.integrate_to(traj.end);
  d2.integrate_to(traj.end);
  cross.integrate_to(traj.end);
  const double whole[3] = {d1.running_integral(), d2.running_integral(), cross.running_integral()};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(whole[i] - (first[i] + second[i])) > 1e-12 * (1.0 + std::abs(whole[i]))) {
      return at("running integral not additive", split);
    }
  }
  return {};
}

std::string check_gain_inverse(const JacobianEstimate& j) {
  const GuardConfig g;
  const Matrix2 a = invert_gain(j, Matrix2::identity(), RegulationMode::Centralized, g);
  const double jm[2][2] = {{j.j11, JacobianEstimate::j12}, {j.j21, j.j22}};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double v = a(r, 0) * jm[0][c] + a(r, 1) * jm[1][c];
      if (std::abs(v - (r == c ? 1.0 : 0.0)) > 1e-12) return "A*J differs from I";
    }
  }
  const Matrix2 d = invert_gain(j, Matrix2::identity(), RegulationMode::Decentralized, g);
  if (d(0, 0) != a(0, 0) || d(1, 1) != a(1, 1)) return "decentralized diagonal differs";
  if (d(0, 1) != 0.0 || d(1, 0) != 0.0) return "decentralized gain not diagonal";
  return {};
}

std::string check_theta_box(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const Vec2 cycle{u(0.5, 2.0), u(0.5, 2.0)};
  const GuardConfig g = GuardConfig::for_cycles(cycle, 1e-3, u(0.05, 0.5));
  ControllerState st;
  st.theta = {u(g.theta_min[0], g.theta_max[0]), u(g.theta_min[1], g.theta_max[1])};
  Matrix2 prev = Matrix2::identity();
  for (int k = 0; k < 50; ++k) {
    JacobianEstimate j{u(-50.0, 50.0), u(-50.0, 50.0), u(-50.0, 50.0), 1.0};
    if (k % 7 == 0) j.j11 = 0.0;
    const RegulationMode mode = k % 2 ? RegulationMode::Centralized : RegulationMode::Decentralized;
    const Matrix2 a = invert_gain(j, prev, mode, g);
    st.e = {u(-100.0, 100.0), u(-100.0, 100.0)};
    const Vec2 before = st.theta;
    st = control_step(st, a, g);
    prev = a;
    for (int i = 0; i < 2; ++i) {
      if (!(st.theta[i] >= g.theta_min[i] && st.theta[i] <= g.theta_max[i])) return "theta left its box";
      if (std::abs(st.theta[i] - before[i]) > g.step_cap[i] * (1.0 + 1e-12)) return "step exceeded its cap";
    }
  }
  return {};
}

std::string check_random_case(std::uint64_t seed) {
  const RandomCase rc = random_case(seed);
  const FrozenScenario& s = rc.scenario;
  const TandemTrajectory traj = simulate_frozen(s, rc.theta);
  const double split = s.start + 0.37 * (s.end - s.start);
  for (const std::string& err :
       {check_nonnegative(traj), check_slopes(traj), check_conservation(s, traj),
        check_red_service(s, rc.theta, traj), check_split(s, rc.theta, split),
        check_determinism(s, rc.theta), check_closed_form(traj, seed, 1000),
        check_quantization(s, traj), check_reset_on_empty(traj),
        check_integral_additivity(traj, split)}) {
    if (!err.empty()) return s.name + ": " + err;
  }
  return {};
}

Vec2 synthetic_plant(const Vec2& u) {
  return {u[0] + 0.5 * u[0] * u[0] * u[0], 0.8 * std::sin(u[0]) + u[1] + 0.3 * u[1] * u[1]};
}

JacobianEstimate synthetic_jacobian(const Vec2& u) {
  return {1.0 + 1.5 * u[0] * u[0], 0.8 * std::cos(u[0]), 1.0 + 0.6 * u[1], 1.0};
}

double newton_discrepancy(int steps) {
  const Vec2 r{1.2, 2.0};
  const Vec2 u0{0.2, 0.3};

  LoopSettings ls;
  ls.reference = r;
  ls.theta_init = u0;
  ls.guards.step_cap = {1e9, 1e9};
  ls.guards.theta_min = {1e-9, 1e-9};
  ls.guards.theta_max = {1e9, 1e9};
  ls.num_cycles = steps + 1;
  const auto rows = run_closed_loop(ls, [](int, const Vec2& u) {
    return PlantResponse{synthetic_plant(u), synthetic_jacobian(u)};
  });

  // Direct iteration: solve J du = r - G(u) by forward substitution.
  Vec2 u = u0;
  double worst = 0.0;
  for (int k = 0; k <= steps; ++k) {
    for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(rows[static_cast<std::size_t>(k)].theta[i] - u[i]));
    const Vec2 g = synthetic_plant(u);
    const JacobianEstimate j = synthetic_jacobian(u);
    const double d1 = (r[0] - g[0]) / j.j11;
    const double d2 = (r[1] - g[1] - j.j21 * d1) / j.j22;
    u = {u[0] + d1, u[1] + d2};
  }
  return worst;
}

}  // namespace tandem::testing
