#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tandem/ipa.hpp"
#include "tandem/regulator.hpp"
#include "tandem/scenario.hpp"

namespace tandem {

/// One closed-loop run: a row per control cycle.
struct RunSeries {
  ExperimentConfig config;
  std::uint32_t replication = 0;
  std::vector<CycleRecord> rows;
  int emptying_triggered_starts = 0;
};

/// Runs the closed loop on the simulated tandem for one replication. The
/// arrival realization depends only on (config.seed, replication).
RunSeries run_experiment(const ExperimentConfig& cfg, std::uint32_t replication,
                         CrossRule rule = CrossRule::ReleasedPerturbation);

/// Control cycles excluded from the error statistics.
inline constexpr int kTransientCycles = 9;

/// Summary of one run: |mean over k >= 10 of G_i,k - r_i| and max over all k
/// of G_i,k.
struct SeriesStats {
  Vec2 mean_error{0.0, 0.0};
  Vec2 max_output{0.0, 0.0};
};

SeriesStats series_stats(std::span<const CycleRecord> rows, const Vec2& reference);

/// One row of the centralized/decentralized comparison, averaged over
/// replications.
struct SweepCell {
  double zeta = 0.0;
  RegulationMode mode = RegulationMode::Centralized;
  int replications = 0;
  Vec2 mean_error{0.0, 0.0};
  Vec2 max_output{0.0, 0.0};
};

/// Runs `jobs` independent tasks on up to `threads` workers; results land in
/// input order so output is independent of scheduling.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

/// Replications 0..replications-1 of `cfg`, in parallel.
std::vector<RunSeries> run_replications(const ExperimentConfig& cfg, unsigned threads = 0);

/// For each zeta (applied to both arrival processes) and each mode, runs
/// cfg.replications seeds and averages their statistics. `on_series`, when
/// set, sees every run in deterministic order.
std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg, std::span<const double> zetas,
                                 const std::function<void(const SweepCell&, const RunSeries&)>&
                                     on_series = {},
                                 unsigned threads = 0);

/// Averages per-run statistics into a cell, in replication order.
SweepCell summarize_cell(double zeta, RegulationMode mode, std::span<const SeriesStats> runs);

}  // namespace tandem
