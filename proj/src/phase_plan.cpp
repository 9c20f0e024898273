#include "tandem/phase_plan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tandem {

void PhasePlan::validate() const {
  for (int i = 0; i < kNumQueues; ++i) {
    const std::string q = std::to_string(i + 1);
    if (!(cycle_length[i] > 0.0) || !std::isfinite(cycle_length[i])) {
      throw std::invalid_argument("cycle length C_" + q + " must be positive");
    }
    if (!(red[i] > 0.0 && red[i] < cycle_length[i])) {
      throw std::invalid_argument("red duration theta_" + q + " must lie in (0, C_" + q + ")");
    }
  }
}

long long cycle_index(double t, double cycle) {
  auto k = static_cast<long long>(std::floor(t / cycle));
  if (static_cast<double>(k + 1) * cycle <= t) ++k;
  if (static_cast<double>(k) * cycle > t) --k;
  return k;
}

std::vector<SwitchEpoch> build_switch_epochs(const PhasePlan& plan, double horizon) {
  plan.validate();
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

  std::vector<SwitchEpoch> out;
  for (int i = 0; i < kNumQueues; ++i) {
    const double c = plan.cycle_length[i];
    for (long long k = 0;; ++k) {
      const double red_start = static_cast<double>(k) * c;
      if (red_start >= horizon) break;
      out.push_back({red_start, SwitchKind::RedStart, i});
      const double green_start = red_start + plan.red[i];
      if (green_start < horizon) out.push_back({green_start, SwitchKind::GreenStart, i});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SwitchEpoch& a, const SwitchEpoch& b) {
    if (a.epoch != b.epoch) return a.epoch < b.epoch;
    return a.queue < b.queue;
  });
  return out;
}

ServiceProfile ServiceProfile::constant(double beta_max_1, double beta_max_2) {
  ServiceProfile p;
  p.mode_ = ServiceMode::Constant;
  p.beta_max_ = {beta_max_1, beta_max_2};
  for (int i = 0; i < kNumQueues; ++i) {
    if (!(p.beta_max_[i] > 0.0) || !std::isfinite(p.beta_max_[i])) {
      throw std::invalid_argument("beta_max_" + std::to_string(i + 1) + " must be positive");
    }
    p.steps_[i] = {{0.0, p.beta_max_[i]}};
  }
  return p;
}

ServiceProfile ServiceProfile::ramp(std::vector<RateSegment> staircase_1,
                                    std::vector<RateSegment> staircase_2) {
  ServiceProfile p;
  p.mode_ = ServiceMode::Ramp;
  p.steps_ = {std::move(staircase_1), std::move(staircase_2)};
  for (int i = 0; i < kNumQueues; ++i) {
    const auto& s = p.steps_[i];
    const std::string q = std::to_string(i + 1);
    if (s.empty() || s.front().start != 0.0) {
      throw std::invalid_argument("ramp staircase " + q + " must start at offset 0");
    }
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!(s[j].rate >= 0.0) || !std::isfinite(s[j].rate)) {
        throw std::invalid_argument("ramp staircase " + q + " has a negative rate");
      }
      if (j > 0 && (!(s[j].start > s[j - 1].start) || s[j].rate < s[j - 1].rate)) {
        throw std::invalid_argument("ramp staircase " + q +
                                    " must have increasing offsets and nondecreasing rates");
      }
    }
    if (!(s.back().rate > 0.0)) {
      throw std::invalid_argument("ramp staircase " + q + " must reach a positive rate");
    }
    p.beta_max_[i] = s.back().rate;
  }
  return p;
}

double ServiceProfile::green_rate(int queue, double elapsed) const {
  const auto& s = steps_[queue];
  auto it = std::upper_bound(s.begin(), s.end(), elapsed,
                             [](double v, const RateSegment& seg) { return v < seg.start; });
  if (it == s.begin()) return s.front().rate;
  return std::prev(it)->rate;
}

}  // namespace tandem
