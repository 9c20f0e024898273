// Command-line front end: closed-loop runs, the centralized/decentralized
// sweep, gradient checks and config echo.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tandem/config_io.hpp"
#include "tandem/experiment.hpp"
#include "tandem/oracle.hpp"
#include "tandem/report.hpp"

namespace {

using namespace tandem;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> replications;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file (key = value)");
  cmd->add_option("--seed", c.seed, "override seed");
  cmd->add_option("--mode", c.mode, "centralized or decentralized")
      ->check(CLI::IsMember({"centralized", "decentralized"}));
  cmd->add_option("--replications", c.replications, "override replications");
  cmd->add_option("--threads", c.threads, "worker threads (0: all cores)");
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? default_paper_config() : parse_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.mode) cfg.mode = parse_mode(*c.mode);
  if (c.replications) cfg.replications = *c.replications;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", 0, e.what());
  }
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void echo_config(const std::string& out_path, const ExperimentConfig& cfg) {
  open_out(out_path + ".config") << format_config(cfg);
}

int cmd_run(const Common& c, const std::string& out_path, std::uint32_t replication) {
  const ExperimentConfig cfg = load(c);
  const RunSeries series = run_experiment(cfg, replication);
  auto out = open_out(out_path);
  write_series_csv(out, series);
  echo_config(out_path, cfg);
  return kExitOk;
}

int cmd_table1(const Common& c, const std::string& out_path, const std::vector<double>& zetas,
               const std::string& series_dir) {
  const ExperimentConfig cfg = load(c);
  for (double z : zetas) {
    if (!(z >= 0.0 && z < 1.0)) throw ConfigError("zeta-list", 0, "zeta-list: values must lie in [0, 1)");
  }
  if (!series_dir.empty()) std::filesystem::create_directories(series_dir);
  const auto cells = run_sweep(cfg, zetas, [&](const SweepCell& cell, const RunSeries& s) {
    if (series_dir.empty()) return;
    char name[96];
    std::snprintf(name, sizeof name, "zeta%.4f_%s_rep%u.csv", cell.zeta,
                  std::string(to_string(cell.mode)).c_str(), s.replication);
    auto out = open_out((std::filesystem::path(series_dir) / name).string());
    write_series_csv(out, s);
  }, c.threads);
  auto out = open_out(out_path);
  write_summary_csv(out, cfg, cells);
  echo_config(out_path, cfg);
  return kExitOk;
}

int cmd_check_grad(const Common& c, const std::string& out_path, const std::string& suite,
                   std::optional<double> h, std::optional<double> rel_tol,
                   const std::string& cross_rule, int count) {
  const CrossRule rule =
      cross_rule == "ignore" ? CrossRule::IgnoreRelease : CrossRule::ReleasedPerturbation;
  std::vector<GradCheckReport> rows;
  auto check = [&](const std::vector<FrozenScenario>& scenarios, GradCheckOptions opt) {
    if (h) opt.h = *h;
    if (rel_tol) opt.rel_tol = *rel_tol;
    opt.rule = rule;
    for (const auto& s : scenarios) {
      auto r = grad_check(s, opt);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  };
  if (suite == "deterministic" || suite == "all") check(deterministic_suite(), kDeterministicCheck);
  if (suite == "stochastic" || suite == "all") check(stochastic_suite(load(c), count), kStochasticCheck);

  if (out_path.empty() || out_path == "-") {
    write_grad_check_csv(std::cout, rows);
  } else {
    auto out = open_out(out_path);
    write_grad_check_csv(out, rows);
  }
  int failed = 0;
  int flagged = 0;
  for (const auto& r : rows) {
    failed += r.pass ? 0 : 1;
    flagged += r.flagged ? 1 : 0;
  }
  std::cerr << rows.size() << " entries, " << flagged << " flagged, " << failed << " failed\n";
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tandem intersection queue regulation with IPA-based adaptive gains"};
  app.set_version_flag("--version", build_version());
  app.require_subcommand(1);

  Common common;
  std::string out_path;

  auto* run = app.add_subcommand("run", "one closed-loop run, written as a series CSV");
  add_common(run, common);
  std::uint32_t replication = 0;
  run->add_option("--out", out_path, "output CSV")->required();
  run->add_option("--replication", replication, "replication index (selects the arrival substream)");

  auto* table1 = app.add_subcommand("table1", "centralized vs decentralized sweep over zeta");
  add_common(table1, common);
  std::vector<double> zetas{0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  std::string series_dir;
  table1->add_option("--out", out_path, "summary CSV")->required();
  table1->add_option("--zeta-list", zetas, "comma-separated zeta values")->delimiter(',');
  table1->add_option("--series-dir", series_dir, "also write every run's series CSV here");

  auto* grad = app.add_subcommand("check-grad", "compare IPA Jacobians with finite differences");
  add_common(grad, common);
  std::string suite = "deterministic";
  std::optional<double> h;
  std::optional<double> rel_tol;
  std::string cross_rule = "released";
  int count = 10;
  grad->add_option("--out", out_path, "report CSV (default: stdout)");
  grad->add_option("--suite", suite, "deterministic, stochastic or all")
      ->check(CLI::IsMember({"deterministic", "stochastic", "all"}));
  grad->add_option("--fd-step", h, "finite-difference step h");
  grad->add_option("--rel-tol", rel_tol, "relative tolerance");
  grad->add_option("--cross-rule", cross_rule, "released or ignore (ignore is a known-biased rule)")
      ->check(CLI::IsMember({"released", "ignore"}));
  grad->add_option("--count", count, "stochastic realizations")->check(CLI::PositiveNumber);

  auto* print = app.add_subcommand("print-config", "print the effective configuration");
  add_common(print, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(common, out_path, replication);
    if (*table1) return cmd_table1(common, out_path, zetas, series_dir);
    if (*grad) return cmd_check_grad(common, out_path, suite, h, rel_tol, cross_rule, count);
    if (*print) {
      std::cout << format_config(load(common));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return kExitOk;
}
