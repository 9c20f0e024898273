#include "tandem/rate_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tandem {

PiecewiseConstantRate::PiecewiseConstantRate(std::vector<RateSegment> segments,
                                             double horizon)
    : segments_(std::move(segments)), horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw std::invalid_argument("rate process horizon must be positive and finite");
  }
  if (segments_.empty()) {
    throw std::invalid_argument("rate process needs at least one segment");
  }
  if (segments_.front().start != 0.0) {
    throw std::invalid_argument("first rate segment must start at 0");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.rate >= 0.0) || !std::isfinite(s.rate)) {
      throw std::invalid_argument("rate segment " + std::to_string(i) +
                                  " has a negative or non-finite rate");
    }
    if (i > 0 && !(s.start > segments_[i - 1].start)) {
      throw std::invalid_argument("rate segment epochs must be strictly increasing");
    }
  }
}

PiecewiseConstantRate PiecewiseConstantRate::constant(double rate, double horizon) {
  return PiecewiseConstantRate({{0.0, rate}}, horizon);
}

std::size_t PiecewiseConstantRate::segment_index(double t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const RateSegment& s) { return v < s.start; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(it - segments_.begin()) - 1;
}

double PiecewiseConstantRate::rate_at(double t) const {
  return segments_[segment_index(t)].rate;
}

}  // namespace tandem
