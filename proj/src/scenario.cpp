#include "tandem/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tandem {

void OnOffSpec::validate() const {
  if (!(mean_rate > 0.0) || !std::isfinite(mean_rate)) {
    throw std::invalid_argument("mean rate must be positive");
  }
  if (!(spread >= 0.0 && spread < 1.0)) throw std::invalid_argument("zeta must lie in [0, 1)");
  if (!(off_max > 0.0) || !(on_max > 0.0)) {
    throw std::invalid_argument("off/on duration bounds must be positive");
  }
}

RandomStream::RandomStream(const StreamKey& key) {
  std::seed_seq seq{static_cast<std::uint32_t>(key.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(key.seed >> 32), key.replication, key.process,
                    std::uint32_t{1}};
  engine_.seed(seq);
}

double RandomStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

PiecewiseConstantRate gen_onoff(const OnOffSpec& spec, const StreamKey& key, double horizon) {
  spec.validate();
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

  RandomStream rng(key);
  std::vector<RateSegment> segs;
  auto push = [&](double start, double rate) {
    if (!segs.empty() && segs.back().rate == rate) return;
    segs.push_back({start, rate});
  };

  const double lo = (1.0 - spec.spread) * spec.mean_rate;
  const double hi = (1.0 + spec.spread) * spec.mean_rate;
  double t = 0.0;
  while (t < horizon) {
    const double off = rng.uniform(0.0, spec.off_max);
    if (off > 0.0) {
      push(t, 0.0);
      t += off;
    }
    if (t >= horizon) break;
    const double on = rng.uniform(0.0, spec.on_max);
    const double rate = rng.uniform(lo, hi);
    if (on > 0.0) {
      push(t, rate);
      t += on;
    }
  }
  return PiecewiseConstantRate(std::move(segs), horizon);
}

ServiceProfile ExperimentConfig::service() const {
  if (service_mode == ServiceMode::Constant) return ServiceProfile::constant(beta_max[0], beta_max[1]);
  std::array<std::vector<RateSegment>, 2> stairs;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < ramp_steps; ++j) {
      const double w = static_cast<double>(j) / (ramp_steps - 1);
      stairs[i].push_back({ramp_duration * w,
                           beta_max[i] * (ramp_initial_fraction + (1.0 - ramp_initial_fraction) * w)});
    }
  }
  return ServiceProfile::ramp(std::move(stairs[0]), std::move(stairs[1]));
}

GuardConfig ExperimentConfig::guards() const {
  return GuardConfig::for_cycles(cycle_length, eps_j, step_cap, theta_min_frac, theta_max_frac);
}

LoopSettings ExperimentConfig::loop_settings() const {
  LoopSettings s;
  s.reference = reference;
  s.theta_init = theta_init;
  s.initial_gain = Matrix2::identity();
  s.mode = mode;
  s.guards = guards();
  s.num_cycles = num_control_cycles;
  return s;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw std::invalid_argument(key + ": " + why);
  };
  for (int i = 0; i < 2; ++i) {
    const std::string q = std::to_string(i + 1);
    if (!(cycle_length[i] > 0.0)) fail("c" + q, "must be positive");
    if (!(beta_max[i] > 0.0)) fail("beta_max" + q, "must be positive");
    if (!(reference[i] >= 0.0)) fail("r" + q, "must be nonnegative");
    if (!(theta_init[i] > 0.0 && theta_init[i] < cycle_length[i])) {
      fail("theta" + q + "_init", "must lie in (0, c" + q + ")");
    }
  }
  if (cycles_per_control < 1) fail("cycles_per_control", "must be at least 1");
  if (num_control_cycles < 0) fail("num_control_cycles", "must be nonnegative");
  const std::pair<const OnOffSpec*, std::string> specs[] = {{&alpha1, "alpha1"}, {&alpha2, "alpha2"}};
  for (const auto& [s, name] : specs) {
    if (!(s->mean_rate > 0.0)) fail(name + "_mean", "must be positive");
    if (!(s->spread >= 0.0 && s->spread < 1.0)) fail(name + "_zeta", "must lie in [0, 1)");
    if (!(s->off_max > 0.0)) fail(name + "_off_max", "must be positive");
    if (!(s->on_max > 0.0)) fail(name + "_on_max", "must be positive");
  }
  if (!(phi >= 0.0 && phi <= 1.0)) fail("phi", "must lie in [0, 1]");
  if (service_mode == ServiceMode::Ramp) {
    if (!(ramp_initial_fraction >= 0.0 && ramp_initial_fraction <= 1.0)) {
      fail("ramp_initial_frac", "must lie in [0, 1]");
    }
    if (!(ramp_duration > 0.0)) fail("ramp_duration", "must be positive");
    if (ramp_steps < 2) fail("ramp_steps", "must be at least 2");
  }
  if (!(eps_j > 0.0)) fail("eps_j", "must be positive");
  if (!(step_cap > 0.0)) fail("step_cap", "must be positive");
  if (!(theta_min_frac > 0.0 && theta_min_frac < 1.0)) fail("theta_min_frac", "must lie in (0, 1)");
  if (!(theta_max_frac > theta_min_frac && theta_max_frac < 1.0)) {
    fail("theta_max_frac", "must lie in (theta_min_frac, 1)");
  }
  if (replications < 1) fail("replications", "must be at least 1");
}

ExperimentConfig default_paper_config() { return ExperimentConfig{}; }

ArrivalRealization generate_arrivals(const ExperimentConfig& cfg, std::uint32_t replication,
                                     double horizon) {
  return {gen_onoff(cfg.alpha1, {cfg.seed, replication, 0}, horizon),
          gen_onoff(cfg.alpha2, {cfg.seed, replication, 1}, horizon)};
}

}  // namespace tandem
