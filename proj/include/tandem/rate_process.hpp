#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tandem {

struct RateSegment {
  double start;
  double rate;

  bool operator==(const RateSegment&) const = default;
};

/// A realization of an exogenous flow-rate process on [0, horizon).
///
/// The rate is right-continuous: at time t it equals the rate of the last
/// segment whose start epoch is <= t. Segment starts are strictly increasing
/// and the first one is 0.
class PiecewiseConstantRate {
 public:
  PiecewiseConstantRate(std::vector<RateSegment> segments, double horizon);

  static PiecewiseConstantRate constant(double rate, double horizon);

  double rate_at(double t) const;

  /// Index of the segment active at time t.
  std::size_t segment_index(double t) const;

  std::span<const RateSegment> segments() const { return segments_; }
  double horizon() const { return horizon_; }

  bool operator==(const PiecewiseConstantRate&) const = default;

 private:
  std::vector<RateSegment> segments_;
  double horizon_;
};

}  // namespace tandem
