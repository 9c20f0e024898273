#include <doctest.h>

#include <map>
#include <sstream>

#include "tandem/report.hpp"

using namespace tandem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c = default_paper_config();
  c.num_control_cycles = 12;
  c.replications = 3;
  return c;
}

}  // namespace

TEST_CASE("series CSV layout") {
  const RunSeries s = run_experiment(small_config(), 0);
  std::ostringstream out;
  write_series_csv(out, s);
  const std::string text = out.str();
  CHECK(text.rfind("# tandem ", 0) == 0);
  CHECK(text.find("# generator = mt19937_64+seed_seq/v1\n") != std::string::npos);
  CHECK(text.find("# seed = 1\n") != std::string::npos);
  CHECK(text.find("# mode = centralized\n") != std::string::npos);
  CHECK(text.find("\nk,theta1,theta2,G1,G2,e1,e2,j11,j21,j22\n") != std::string::npos);

  std::istringstream in(text);
  const auto rows = read_series_csv(in);
  REQUIRE(rows.size() == s.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].k == s.rows[i].k);
    CHECK(rows[i].theta == s.rows[i].theta);
    CHECK(rows[i].y == s.rows[i].y);
    CHECK(rows[i].e == s.rows[i].e);
    CHECK(rows[i].jacobian.j21 == s.rows[i].jacobian.j21);
  }
}

TEST_CASE("no control cycles gives a header and no rows") {
  ExperimentConfig c = small_config();
  c.num_control_cycles = 0;
  std::ostringstream out;
  write_series_csv(out, run_experiment(c, 0));
  const std::string text = out.str();
  CHECK(text.size() > 0);
  const auto last_line = text.substr(text.rfind('\n', text.size() - 2) + 1);
  CHECK(last_line == "k,theta1,theta2,G1,G2,e1,e2,j11,j21,j22\n");
}

TEST_CASE("summary recomputed from the series files matches exactly") {
  const ExperimentConfig c = small_config();
  const std::vector<double> zetas{0.1, 0.3};
  std::map<std::pair<double, int>, std::vector<std::string>> files;
  const auto cells = run_sweep(c, zetas, [&](const SweepCell& cell, const RunSeries& s) {
    std::ostringstream out;
    write_series_csv(out, s);
    files[{cell.zeta, static_cast<int>(cell.mode)}].push_back(out.str());
  });
  REQUIRE(cells.size() == 4);

  std::vector<SweepCell> again;
  for (const auto& cell : cells) {
    std::vector<SeriesStats> stats;
    for (const auto& text : files[{cell.zeta, static_cast<int>(cell.mode)}]) {
      std::istringstream in(text);
      stats.push_back(series_stats(read_series_csv(in), c.reference));
    }
    again.push_back(summarize_cell(cell.zeta, cell.mode, stats));
  }
  std::ostringstream a, b;
  write_summary_csv(a, c, cells);
  write_summary_csv(b, c, again);
  CHECK(a.str() == b.str());
}

TEST_CASE("parallel and serial sweeps are byte-identical") {
  const ExperimentConfig c = small_config();
  const std::vector<double> zetas{0.2};
  std::ostringstream a, b;
  write_summary_csv(a, c, run_sweep(c, zetas, {}, 1));
  write_summary_csv(b, c, run_sweep(c, zetas, {}, 4));
  CHECK(a.str() == b.str());
}

TEST_CASE("mean error skips the transient cycles") {
  std::vector<CycleRecord> rows;
  for (int k = 1; k <= 12; ++k) {
    CycleRecord r;
    r.k = k;
    r.y = {k < 10 ? 100.0 : 0.2, 0.1};
    rows.push_back(r);
  }
  const auto st = series_stats(rows, {0.1, 0.1});
  CHECK(st.mean_error[0] == doctest::Approx(0.1));
  CHECK(st.mean_error[1] == doctest::Approx(0.0));
  CHECK(st.max_output[0] == 100.0);
}

TEST_CASE("seventeen significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
