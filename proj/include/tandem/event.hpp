#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace tandem {

/// Event kinds in the order they are logged when several share an epoch.
enum class EventKind {
  ControlCycleBoundary,
  RedStart,
  GreenStart,
  ExogenousRateJump,
  ServiceStep,  // ramp-mode staircase step of beta_i inside a green period
  InternalRateJump,
  EmptyStart,
  BusyStart,
};

std::string_view to_string(EventKind kind);

/// Exogenous process ids carried by ExogenousRateJump events.
inline constexpr int kArrivals1 = 0;
inline constexpr int kArrivals2Tilde = 1;

/// All rates of the tandem at one side of an epoch.
struct RateSnapshot {
  double alpha1 = 0.0;
  double alpha2_tilde = 0.0;
  double alpha2 = 0.0;
  std::array<double, 2> beta{0.0, 0.0};
  double delta1 = 0.0;

  double inflow(int queue) const { return queue == 0 ? alpha1 : alpha2; }
  double net_rate(int queue) const { return inflow(queue) - beta[queue]; }

  bool operator==(const RateSnapshot&) const = default;
};

struct EventRef {
  EventKind kind;
  int source;

  bool operator==(const EventRef&) const = default;
};

/// One entry of the simulation log.
///
/// `source` is the queue index (0 or 1) for queue events, the process id for
/// ExogenousRateJump, and -1 for InternalRateJump and ControlCycleBoundary.
/// `before` and `after` are the left and right limits of every rate at the
/// epoch; they are shared by all events logged at the same epoch. `trigger`
/// is set on BusyStart and names the event whose rate change started the busy
/// period.
struct Event {
  double epoch = 0.0;
  EventKind kind = EventKind::ControlCycleBoundary;
  int source = -1;
  RateSnapshot before;
  RateSnapshot after;
  std::array<bool, 2> busy_before{false, false};
  std::array<bool, 2> busy_after{false, false};
  std::array<double, 2> contents{0.0, 0.0};
  std::optional<EventRef> trigger;

  bool is(EventKind k, int src) const { return kind == k && source == src; }

  bool operator==(const Event&) const = default;
};

}  // namespace tandem
