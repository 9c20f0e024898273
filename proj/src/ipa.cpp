#include "tandem/ipa.hpp"

#include <algorithm>
#include <stdexcept>

namespace tandem {

namespace {

void check_order(bool started, double last, double epoch) {
  if (started && epoch < last) throw std::invalid_argument("IPA events arrived out of order");
}

}  // namespace

DiagIpaAccumulator::DiagIpaAccumulator(int queue) : queue_(queue) {
  if (queue < 0 || queue >= kNumQueues) throw std::invalid_argument("queue index out of range");
}

double DiagIpaAccumulator::value() const {
  return busy_ ? (cycle_sum_ + current_rate_) - base_rate_ : 0.0;
}

void DiagIpaAccumulator::integrate_to(double t) {
  check_order(started_, last_epoch_, t);
  if (started_) integral_ += value() * (t - last_epoch_);
  started_ = true;
  last_epoch_ = t;
}

void DiagIpaAccumulator::on_event(const Event& ev) {
  integrate_to(ev.epoch);
  const double beta_after = ev.after.beta[queue_];
  switch (ev.kind) {
    case EventKind::ControlCycleBoundary:
      busy_ = ev.busy_after[queue_];
      cycle_sum_ = 0.0;
      base_rate_ = beta_after;
      current_rate_ = beta_after;
      integral_ = 0.0;
      return;
    default:
      break;
  }
  if (ev.source != queue_) return;
  switch (ev.kind) {
    case EventKind::BusyStart:
      busy_ = true;
      cycle_sum_ = 0.0;
      base_rate_ = beta_after;
      current_rate_ = beta_after;
      break;
    case EventKind::EmptyStart:
      busy_ = false;
      break;
    case EventKind::RedStart:
      // The cycle-start term gained equals the service rate lost.
      if (busy_) cycle_sum_ += ev.before.beta[queue_];
      current_rate_ = beta_after;
      break;
    case EventKind::GreenStart:
    case EventKind::ServiceStep:
      current_rate_ = beta_after;
      break;
    default:
      break;
  }
}

CrossIpaAccumulator::CrossIpaAccumulator(CrossRule rule) : rule_(rule) {}

void CrossIpaAccumulator::integrate_to(double t) {
  check_order(started_, last_epoch_, t);
  if (started_) integral_ += value_ * (t - last_epoch_);
  started_ = true;
  last_epoch_ = t;
}

void CrossIpaAccumulator::on_event(const Event& ev, const DiagIpaAccumulator& diag1, double phi) {
  if (diag1.queue() != 0) throw std::invalid_argument("cross accumulator needs the first queue's diagonal");
  integrate_to(ev.epoch);

  switch (ev.kind) {
    case EventKind::ControlCycleBoundary:
      value_ = 0.0;
      integral_ = 0.0;
      busy2_ = ev.busy_after[1];
      release_epoch_ = -1.0;
      return;

    case EventKind::EmptyStart:
      if (ev.source == 1) {
        value_ = 0.0;
        busy2_ = false;
      } else {
        // The emptying epoch moves by -(d x_1/d theta_1)/(alpha_1 - beta_1), and
        // delta_1 drops by (beta_1 - alpha_1) there.
        const double r1 = ev.before.net_rate(0);
        release_sensitivity_ = r1 < 0.0 ? -diag1.value() / r1 : 0.0;
        release_epoch_ = ev.epoch;
        if (busy2_ && rule_ == CrossRule::ReleasedPerturbation) value_ += phi * diag1.value();
      }
      return;

    case EventKind::BusyStart: {
      if (ev.source != 1) return;
      if (!ev.trigger) throw std::invalid_argument("BusyStart of the second queue lacks a trigger");
      double start_sensitivity = 0.0;
      const EventRef& trig = *ev.trigger;
      if (trig == EventRef{EventKind::GreenStart, 0} ||
          trig == EventRef{EventKind::ServiceStep, 0}) {
        start_sensitivity = 1.0;
      } else if (trig == EventRef{EventKind::EmptyStart, 0}) {
        ++emptying_triggered_;
        if (release_epoch_ == ev.epoch) start_sensitivity = release_sensitivity_;
      }
      busy2_ = true;
      value_ = -ev.after.net_rate(1) * start_sensitivity;
      return;
    }

    case EventKind::GreenStart:
    case EventKind::ServiceStep:
      // Jump of alpha_2 at an epoch that moves one-for-one with theta_1.
      if (ev.source == 0 && busy2_) value_ += phi * (ev.before.delta1 - ev.after.delta1);
      return;

    default:
      return;
  }
}

JacobianEstimate assemble_jacobian(const DiagIpaAccumulator& diag1,
                                   const DiagIpaAccumulator& diag2,
                                   const CrossIpaAccumulator& cross, double window) {
  if (!(window > 0.0)) throw std::invalid_argument("Jacobian window must be positive");
  if (diag1.queue() != 0 || diag2.queue() != 1) {
    throw std::invalid_argument("diagonal accumulators passed in the wrong order");
  }
  JacobianEstimate j;
  j.j11 = diag1.running_integral() / window;
  j.j21 = cross.running_integral() / window;
  j.j22 = diag2.running_integral() / window;
  j.window = window;
  return j;
}

double diag_closed_form(double t, std::span<const Event> log, int queue) {
  auto last = std::upper_bound(log.begin(), log.end(), t,
                               [](double v, const Event& e) { return v < e.epoch; });
  if (last == log.begin()) throw std::invalid_argument("time precedes the event log");
  const auto n = static_cast<std::size_t>(last - log.begin());

  std::size_t start = n;
  for (std::size_t j = n; j-- > 0;) {
    const Event& e = log[j];
    if (e.is(EventKind::EmptyStart, queue)) return 0.0;
    if (e.is(EventKind::BusyStart, queue)) {
      start = j;
      break;
    }
    if (e.kind == EventKind::ControlCycleBoundary) {
      if (!e.busy_after[queue]) return 0.0;
      start = j;
      break;
    }
  }
  if (start == n) throw std::invalid_argument("event log does not begin with a window boundary");

  double cycle_sum = 0.0;
  for (std::size_t j = start + 1; j < n; ++j) {
    if (log[j].is(EventKind::RedStart, queue)) cycle_sum += log[j].before.beta[queue];
  }
  return (cycle_sum + log[n - 1].after.beta[queue]) - log[start].after.beta[queue];
}

IpaResult estimate_jacobian(const TandemTrajectory& traj, CrossRule rule) {
  DiagIpaAccumulator d1(0), d2(1);
  CrossIpaAccumulator cross(rule);
  for (const auto& ev : traj.events) {
    cross.on_event(ev, d1, traj.phi);
    d1.on_event(ev);
    d2.on_event(ev);
  }
  d1.integrate_to(traj.end);
  d2.integrate_to(traj.end);
  cross.integrate_to(traj.end);
  return {assemble_jacobian(d1, d2, cross, traj.end - traj.start), cross.emptying_triggered_starts()};
}

}  // namespace tandem
