#include "tandem/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tandem/simulator.hpp"

namespace tandem {

RunSeries run_experiment(const ExperimentConfig& cfg, std::uint32_t replication, CrossRule rule) {
  cfg.validate();
  RunSeries series;
  series.config = cfg;
  series.replication = replication;
  if (cfg.num_control_cycles == 0) return series;

  const double period = cfg.control_period();
  const ArrivalRealization arrivals = generate_arrivals(cfg, replication, cfg.horizon());
  TandemSimulator sim(arrivals.alpha1, arrivals.alpha2_tilde,
                      PhasePlan{cfg.cycle_length, cfg.theta_init}, cfg.service(), cfg.phi,
                      {0.0, 0.0}, 0.0);

  int emptying_starts = 0;
  const Plant plant = [&](int k, const Vec2& theta) {
    sim.set_red(theta);
    const TandemTrajectory window = sim.advance(static_cast<double>(k) * period);
    const IpaResult ipa = estimate_jacobian(window, rule);
    emptying_starts += ipa.emptying_triggered_starts;
    return PlantResponse{queue_integral(window, window.start, window.end), ipa.jacobian};
  };
  series.rows = run_closed_loop(cfg.loop_settings(), plant);
  series.emptying_triggered_starts = emptying_starts;
  return series;
}

SeriesStats series_stats(std::span<const CycleRecord> rows, const Vec2& reference) {
  SeriesStats s;
  s.max_output = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  Vec2 sum{0.0, 0.0};
  int count = 0;
  for (const auto& row : rows) {
    for (int i = 0; i < 2; ++i) s.max_output[i] = std::max(s.max_output[i], row.y[i]);
    if (row.k > kTransientCycles) {
      sum[0] += row.y[0];
      sum[1] += row.y[1];
      ++count;
    }
  }
  for (int i = 0; i < 2; ++i) {
    s.mean_error[i] = count > 0 ? std::abs(sum[i] / count - reference[i])
                                : std::numeric_limits<double>::quiet_NaN();
    if (rows.empty()) s.max_output[i] = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

SweepCell summarize_cell(double zeta, RegulationMode mode, std::span<const SeriesStats> runs) {
  SweepCell cell;
  cell.zeta = zeta;
  cell.mode = mode;
  cell.replications = static_cast<int>(runs.size());
  for (const auto& r : runs) {
    for (int i = 0; i < 2; ++i) {
      cell.mean_error[i] += r.mean_error[i];
      cell.max_output[i] += r.max_output[i];
    }
  }
  for (int i = 0; i < 2; ++i) {
    cell.mean_error[i] /= static_cast<double>(runs.size());
    cell.max_output[i] /= static_cast<double>(runs.size());
  }
  return cell;
}

void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& body,
                  unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<RunSeries> run_replications(const ExperimentConfig& cfg, unsigned threads) {
  std::vector<RunSeries> out(static_cast<std::size_t>(cfg.replications));
  parallel_for(out.size(), [&](std::size_t r) {
    out[r] = run_experiment(cfg, static_cast<std::uint32_t>(r));
  }, threads);
  return out;
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg, std::span<const double> zetas,
                                 const std::function<void(const SweepCell&, const RunSeries&)>& on_series,
                                 unsigned threads) {
  constexpr RegulationMode kModes[] = {RegulationMode::Centralized, RegulationMode::Decentralized};
  const auto reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t cells = zetas.size() * 2;

  std::vector<ExperimentConfig> cell_cfg;
  for (double z : zetas) {
    for (RegulationMode m : kModes) {
      ExperimentConfig c = cfg;
      c.alpha1.spread = z;
      c.alpha2.spread = z;
      c.mode = m;
      c.validate();
      cell_cfg.push_back(c);
    }
  }

  std::vector<RunSeries> runs(cells * reps);
  parallel_for(runs.size(), [&](std::size_t job) {
    runs[job] = run_experiment(cell_cfg[job / reps], static_cast<std::uint32_t>(job % reps));
  }, threads);

  std::vector<SweepCell> out;
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<SeriesStats> stats;
    for (std::size_t r = 0; r < reps; ++r) {
      const RunSeries& s = runs[c * reps + r];
      stats.push_back(series_stats(s.rows, s.config.reference));
    }
    out.push_back(summarize_cell(cell_cfg[c].alpha1.spread, cell_cfg[c].mode, stats));
    if (on_series) {
      for (std::size_t r = 0; r < reps; ++r) on_series(out.back(), runs[c * reps + r]);
    }
  }
  return out;
}

}  // namespace tandem
