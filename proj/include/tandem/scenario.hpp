#pragma once

#include <cstdint>
#include <random>

#include "tandem/phase_plan.hpp"
#include "tandem/rate_process.hpp"
#include "tandem/regulator.hpp"

namespace tandem {

/// Off/on arrival process: off stages have rate 0 and last Uniform[0, off_max];
/// on stages last Uniform[0, on_max] and carry one rate drawn from
/// Uniform[(1 - spread) * mean_rate, (1 + spread) * mean_rate].
struct OnOffSpec {
  double mean_rate = 4.1;
  double spread = 0.3;
  double off_max = 0.02;
  double on_max = 0.063;

  void validate() const;
};

/// Identifies one independent random substream: one per arrival process per
/// replication.
struct StreamKey {
  std::uint64_t seed = 1;
  std::uint32_t replication = 0;
  std::uint32_t process = 0;
};

/// Name of the generator algorithm; bump when the draw sequence changes.
inline constexpr const char* kGeneratorName = "mt19937_64+seed_seq/v1";

/// Portable uniform draws: std::mt19937_64 seeded through std::seed_seq from
/// (seed low word, seed high word, replication, process, 1). Both are fully
/// specified by the standard; doubles use the top 53 bits of each output.
class RandomStream {
 public:
  explicit RandomStream(const StreamKey& key);

  /// Uniform on [0, 1).
  double uniform01();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Draw order per stage pair: off duration, on duration, on rate.
/// Zero-length stages are skipped and equal adjacent rates merged.
PiecewiseConstantRate gen_onoff(const OnOffSpec& spec, const StreamKey& key, double horizon);

struct ExperimentConfig {
  Vec2 cycle_length{1.0, 1.0};
  int cycles_per_control = 20;
  int num_control_cycles = 50;
  OnOffSpec alpha1{4.1, 0.3, 0.02, 0.063};
  OnOffSpec alpha2{0.41, 0.3, 0.02, 0.063};
  double phi = 0.9;
  Vec2 beta_max{5.0, 5.0};
  ServiceMode service_mode = ServiceMode::Constant;
  // Ramp mode: linear staircase from ramp_initial_fraction * beta_max up to
  // beta_max over ramp_duration, in ramp_steps steps.
  double ramp_initial_fraction = 0.5;
  double ramp_duration = 0.1;
  int ramp_steps = 4;
  Vec2 reference{0.1, 0.1};
  Vec2 theta_init{0.8, 0.8};
  RegulationMode mode = RegulationMode::Centralized;
  double eps_j = 1e-3;
  double step_cap = 0.25;  // fraction of C_i
  double theta_min_frac = 0.02;
  double theta_max_frac = 0.98;
  std::uint64_t seed = 1;
  int replications = 10;

  /// Length of one control cycle: cycles_per_control light cycles of queue 1.
  double control_period() const { return cycles_per_control * cycle_length[0]; }
  double horizon() const { return control_period() * num_control_cycles; }

  ServiceProfile service() const;
  GuardConfig guards() const;
  LoopSettings loop_settings() const;

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

ExperimentConfig default_paper_config();

struct ArrivalRealization {
  PiecewiseConstantRate alpha1;
  PiecewiseConstantRate alpha2_tilde;
};

/// Both exogenous processes of one replication over [0, horizon).
ArrivalRealization generate_arrivals(const ExperimentConfig& cfg, std::uint32_t replication,
                                     double horizon);

}  // namespace tandem
