#include "tandem/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tandem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<EventRef> find_primary(const std::vector<Event>& primary, EventKind kind,
                                     int source) {
  for (const auto& e : primary) {
    if (e.is(kind, source)) return EventRef{kind, source};
  }
  return std::nullopt;
}

EventRef first_of(const std::vector<Event>& primary) {
  if (primary.empty()) return EventRef{EventKind::ControlCycleBoundary, -1};
  return EventRef{primary.front().kind, primary.front().source};
}

// Last staircase index whose offset lies strictly before `elapsed`.
std::size_t step_before(const std::vector<RateSegment>& steps, double elapsed) {
  std::size_t j = 0;
  while (j + 1 < steps.size() && steps[j + 1].start < elapsed) ++j;
  return j;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ControlCycleBoundary: return "ControlCycleBoundary";
    case EventKind::RedStart: return "RedStart";
    case EventKind::GreenStart: return "GreenStart";
    case EventKind::ExogenousRateJump: return "ExogenousRateJump";
    case EventKind::ServiceStep: return "ServiceStep";
    case EventKind::InternalRateJump: return "InternalRateJump";
    case EventKind::EmptyStart: return "EmptyStart";
    case EventKind::BusyStart: return "BusyStart";
  }
  return "?";
}

double outflow_rate(double x1, double alpha1, double beta1) {
  if (!(x1 >= 0.0)) throw std::invalid_argument("queue content must be nonnegative");
  return x1 > 0.0 ? beta1 : alpha1;
}

double merge_inflow(double delta1, double alpha2_tilde, double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("phi must lie in [0, 1]");
  return phi * delta1 + alpha2_tilde;
}

Vec2 TandemTrajectory::contents_at(double t) const {
  if (breakpoints.empty() || t < breakpoints.front().epoch || t > breakpoints.back().epoch) {
    throw std::out_of_range("time outside trajectory");
  }
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t,
                             [](double v, const Breakpoint& b) { return v < b.epoch; });
  if (it == breakpoints.end()) return breakpoints.back().x;
  const Breakpoint& hi = *it;
  const Breakpoint& lo = *std::prev(it);
  if (hi.epoch == lo.epoch) return hi.x;
  const double w = (t - lo.epoch) / (hi.epoch - lo.epoch);
  return {lo.x[0] + w * (hi.x[0] - lo.x[0]), lo.x[1] + w * (hi.x[1] - lo.x[1])};
}

Vec2 queue_integral(const TandemTrajectory& traj, double t_a, double t_b) {
  if (!(t_b > t_a)) throw std::invalid_argument("integration window is empty");
  if (t_a < traj.start || t_b > traj.end) {
    throw std::invalid_argument("integration window outside the simulated horizon");
  }
  Vec2 avg{0.0, 0.0};
  for (int q = 0; q < kNumQueues; ++q) {
    // Only the queue's own knots: the path is linear between them, and the
    // result does not depend on the other queue's event epochs.
    double area = 0.0;
    const Breakpoint* prev = nullptr;
    for (const auto& bp : traj.breakpoints) {
      if (!bp.is_knot(q)) continue;
      if (prev != nullptr && bp.epoch > prev->epoch) {
        const double lo = std::max(prev->epoch, t_a);
        const double hi = std::min(bp.epoch, t_b);
        if (hi > lo) {
          const double slope = (bp.x[q] - prev->x[q]) / (bp.epoch - prev->epoch);
          const double x_lo = lo == prev->epoch ? prev->x[q] : prev->x[q] + slope * (lo - prev->epoch);
          const double x_hi = hi == bp.epoch ? bp.x[q] : prev->x[q] + slope * (hi - prev->epoch);
          area += 0.5 * (x_lo + x_hi) * (hi - lo);
        }
      }
      prev = &bp;
    }
    avg[q] = area / (t_b - t_a);
  }
  return avg;
}

TandemSimulator::TandemSimulator(const PiecewiseConstantRate& arrivals_1,
                                 const PiecewiseConstantRate& arrivals_2_tilde,
                                 const PhasePlan& plan, const ServiceProfile& service,
                                 double phi, Vec2 x0, double start)
    : arrivals_{&arrivals_1, &arrivals_2_tilde},
      plan_(plan),
      service_(service),
      phi_(phi),
      now_(start) {
  plan_.validate();
  if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("phi must lie in [0, 1]");
  if (!(start >= 0.0) || !std::isfinite(start)) {
    throw std::invalid_argument("simulation start must be a nonnegative time");
  }
  for (int i = 0; i < kNumQueues; ++i) {
    if (!(x0[i] >= 0.0) || !std::isfinite(x0[i])) {
      throw std::invalid_argument("initial queue contents must be nonnegative");
    }
  }
  init_lights(start);
  init_exogenous(start);
  const RateSnapshot r = current_rates();
  for (int i = 0; i < kNumQueues; ++i) {
    Fluid& f = fluid_[i];
    f.anchor_t = start;
    f.anchor_x = x0[i];
    f.busy = x0[i] > 0.0;
    f.slope = f.busy ? r.net_rate(i) : 0.0;
    f.empty_time = f.busy && f.slope < 0.0 ? start + x0[i] / -f.slope : kInf;
  }
}

void TandemSimulator::set_red(const Vec2& red) {
  PhasePlan next = plan_;
  next.red = red;
  next.validate();
  pending_red_ = red;
}

void TandemSimulator::init_lights(double t) {
  // Light state as of t-: a switch falling exactly on t is left to fire as an event.
  for (int i = 0; i < kNumQueues; ++i) {
    const double c = plan_.cycle_length[i];
    const double red = plan_.red[i];
    const auto& steps = service_.staircase(i);
    const long long k = cycle_index(t, c);
    const double cycle_start = static_cast<double>(k) * c;
    Light l;
    if (t == cycle_start) {
      l.cycle = k - 1;
      l.green = true;
      l.green_start = static_cast<double>(k - 1) * c + red;
      l.step = step_before(steps, t - l.green_start);
    } else if (t <= cycle_start + red) {
      l.cycle = k;
      l.green = false;
    } else {
      l.cycle = k;
      l.green = true;
      l.green_start = cycle_start + red;
      l.step = step_before(steps, t - l.green_start);
    }
    light_[i] = l;
  }
}

void TandemSimulator::init_exogenous(double t) {
  for (int p = 0; p < 2; ++p) {
    const auto segs = arrivals_[p]->segments();
    std::size_t idx = arrivals_[p]->segment_index(t);
    if (idx > 0 && segs[idx].start == t) --idx;
    segment_[p] = idx;
    exogenous_[p] = segs[idx].rate;
  }
}

double TandemSimulator::next_switch(int queue) const {
  const Light& l = light_[queue];
  const double c = plan_.cycle_length[queue];
  return l.green ? static_cast<double>(l.cycle + 1) * c
                 : static_cast<double>(l.cycle) * c + plan_.red[queue];
}

double TandemSimulator::next_step(int queue) const {
  const Light& l = light_[queue];
  const auto& steps = service_.staircase(queue);
  if (!l.green || l.step + 1 >= steps.size()) return kInf;
  const double e = l.green_start + steps[l.step + 1].start;
  return e < next_switch(queue) ? e : kInf;
}

double TandemSimulator::next_jump(int process) const {
  const auto segs = arrivals_[process]->segments();
  const std::size_t next = segment_[process] + 1;
  return next < segs.size() ? segs[next].start : kInf;
}

double TandemSimulator::position(int queue, double t) const {
  const Fluid& f = fluid_[queue];
  if (!f.busy) return 0.0;
  return std::max(0.0, f.anchor_x + f.slope * (t - f.anchor_t));
}

Vec2 TandemSimulator::contents() const { return {position(0, now_), position(1, now_)}; }

RateSnapshot TandemSimulator::current_rates() const {
  RateSnapshot r;
  r.alpha1 = exogenous_[0];
  r.alpha2_tilde = exogenous_[1];
  for (int i = 0; i < kNumQueues; ++i) {
    r.beta[i] = light_[i].green ? service_.staircase(i)[light_[i].step].rate : 0.0;
  }
  r.delta1 = fluid_[0].busy ? r.beta[0] : r.alpha1;
  r.alpha2 = merge_inflow(r.delta1, r.alpha2_tilde, phi_);
  return r;
}

TandemTrajectory TandemSimulator::advance(double end) {
  if (!(end > now_) || !std::isfinite(end)) {
    throw std::invalid_argument("window end must lie after the current time");
  }
  for (const auto* a : arrivals_) {
    if (end > a->horizon()) throw std::invalid_argument("window extends past the arrival horizon");
  }

  TandemTrajectory out;
  out.start = now_;
  out.end = end;
  out.phi = phi_;

  {
    const RateSnapshot before = current_rates();
    if (pending_red_) {
      plan_.red = *pending_red_;
      pending_red_.reset();
      init_lights(now_);
    }
    Event boundary;
    boundary.kind = EventKind::ControlCycleBoundary;
    settle(now_, {boundary}, before, out);
  }

  for (;;) {
    std::array<double, 2> sw{}, st{}, jp{}, em{};
    double t = kInf;
    for (int i = 0; i < kNumQueues; ++i) {
      sw[i] = next_switch(i);
      st[i] = next_step(i);
      jp[i] = next_jump(i);
      const Fluid& f = fluid_[i];
      em[i] = f.busy && f.slope < 0.0 ? f.empty_time : kInf;
      t = std::min({t, sw[i], st[i], jp[i], em[i]});
    }
    if (!(t < end)) break;

    const RateSnapshot before = current_rates();
    std::vector<Event> primary;
    for (int i = 0; i < kNumQueues; ++i) {
      if (sw[i] != t) continue;
      Light& l = light_[i];
      Event e;
      e.source = i;
      if (l.green) {
        ++l.cycle;
        l.green = false;
        e.kind = EventKind::RedStart;
      } else {
        l.green = true;
        l.green_start = t;
        l.step = 0;
        e.kind = EventKind::GreenStart;
      }
      primary.push_back(e);
    }
    for (int p = 0; p < 2; ++p) {
      if (jp[p] != t) continue;
      ++segment_[p];
      exogenous_[p] = arrivals_[p]->segments()[segment_[p]].rate;
      Event e;
      e.kind = EventKind::ExogenousRateJump;
      e.source = p;
      primary.push_back(e);
    }
    for (int i = 0; i < kNumQueues; ++i) {
      if (st[i] != t) continue;
      ++light_[i].step;
      Event e;
      e.kind = EventKind::ServiceStep;
      e.source = i;
      primary.push_back(e);
    }
    settle(t, std::move(primary), before, out);
  }

  out.breakpoints.push_back({end, {position(0, end), position(1, end)}, 0b11});
  now_ = end;
  return out;
}

void TandemSimulator::settle(double t, std::vector<Event> primary, const RateSnapshot& before,
                             TandemTrajectory& out) {
  const std::array<bool, 2> busy_before{fluid_[0].busy, fluid_[1].busy};
  Vec2 x{position(0, t), position(1, t)};
  std::array<bool, 2> emptied{false, false};
  std::array<bool, 2> started{false, false};

  // The first queue is resolved before the second because alpha_2 depends on delta_1.
  for (int i = 0; i < kNumQueues; ++i) {
    Fluid& f = fluid_[i];
    const RateSnapshot r = current_rates();
    if (f.busy && (x[i] <= 0.0 || t >= f.empty_time)) {
      x[i] = 0.0;
      f.busy = false;
      emptied[i] = true;
    }
    if (!f.busy && r.inflow(i) > r.beta[i]) {
      f.busy = true;
      started[i] = true;
    }
  }
  const RateSnapshot after = current_rates();

  std::uint8_t knots =
      !primary.empty() && primary.front().kind == EventKind::ControlCycleBoundary ? 0b11 : 0;
  for (int i = 0; i < kNumQueues; ++i) {
    Fluid& f = fluid_[i];
    const double slope = f.busy ? after.net_rate(i) : 0.0;
    if (emptied[i] || started[i] || slope != f.slope) {
      f.anchor_t = t;
      f.anchor_x = x[i];
      f.slope = slope;
      knots |= static_cast<std::uint8_t>(1u << i);
    }
    f.empty_time = f.busy && f.slope < 0.0 ? f.anchor_t + f.anchor_x / -f.slope : kInf;
  }

  std::vector<Event> events = std::move(primary);
  const auto primary_count = events.size();
  if (before.delta1 != after.delta1) {
    Event e;
    e.kind = EventKind::InternalRateJump;
    events.push_back(e);
  }
  for (int i = 0; i < kNumQueues; ++i) {
    if (!emptied[i]) continue;
    Event e;
    e.kind = EventKind::EmptyStart;
    e.source = i;
    events.push_back(e);
  }
  const std::vector<Event> causes(events.begin(), events.begin() + primary_count);
  for (int i = 0; i < kNumQueues; ++i) {
    if (!started[i]) continue;
    Event e;
    e.kind = EventKind::BusyStart;
    e.source = i;
    std::optional<EventRef> trig;
    if (i == 0) {
      if (after.beta[0] < before.beta[0]) {
        trig = find_primary(causes, EventKind::RedStart, 0);
      } else if (after.alpha1 > before.alpha1) {
        trig = find_primary(causes, EventKind::ExogenousRateJump, kArrivals1);
      }
    } else {
      if (phi_ > 0.0 && after.delta1 > before.delta1) {
        if (started[0]) {
          trig = EventRef{EventKind::BusyStart, 0};
        } else if (busy_before[0] && after.beta[0] > before.beta[0]) {
          trig = find_primary(causes, EventKind::GreenStart, 0);
          if (!trig) trig = find_primary(causes, EventKind::ServiceStep, 0);
        } else if (after.alpha1 != before.alpha1) {
          trig = find_primary(causes, EventKind::ExogenousRateJump, kArrivals1);
        }
      } else if (after.beta[1] < before.beta[1]) {
        trig = find_primary(causes, EventKind::RedStart, 1);
      } else if (after.alpha2_tilde > before.alpha2_tilde) {
        trig = find_primary(causes, EventKind::ExogenousRateJump, kArrivals2Tilde);
      }
    }
    e.trigger = trig ? *trig : first_of(causes);
    events.push_back(e);
  }

  for (auto& e : events) {
    e.epoch = t;
    e.before = before;
    e.after = after;
    e.busy_before = busy_before;
    e.busy_after = {fluid_[0].busy, fluid_[1].busy};
    e.contents = x;
    out.events.push_back(std::move(e));
  }
  out.breakpoints.push_back({t, x, knots});
}

TandemTrajectory simulate(const PiecewiseConstantRate& arrivals_1,
                          const PiecewiseConstantRate& arrivals_2_tilde, const PhasePlan& plan,
                          const ServiceProfile& service, double phi, Vec2 x0, double horizon) {
  TandemSimulator sim(arrivals_1, arrivals_2_tilde, plan, service, phi, x0, 0.0);
  return sim.advance(horizon);
}

}  // namespace tandem
