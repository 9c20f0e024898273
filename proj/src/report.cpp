#include "tandem/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tandem/config_io.hpp"

#ifndef TANDEM_VERSION
#define TANDEM_VERSION "unknown"
#endif

namespace tandem {

namespace {

void write_metadata(std::ostream& out, const ExperimentConfig& cfg) {
  out << "# tandem " << build_version() << "\n";
  out << "# generator = " << kGeneratorName << "\n";
  std::istringstream lines(format_config(cfg));
  for (std::string line; std::getline(lines, line);) out << "# " << line << "\n";
}

}  // namespace

std::string build_version() { return TANDEM_VERSION; }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series_csv(std::ostream& out, const RunSeries& series) {
  write_metadata(out, series.config);
  out << "# replication = " << series.replication << "\n";
  out << "# initial_gain = 1 0 0 1\n";
  out << "# emptying_triggered_starts = " << series.emptying_triggered_starts << "\n";
  out << "k,theta1,theta2,G1,G2,e1,e2,j11,j21,j22\n";
  for (const auto& r : series.rows) {
    out << r.k;
    for (double v : {r.theta[0], r.theta[1], r.y[0], r.y[1], r.e[0], r.e[1], r.jacobian.j11,
                     r.jacobian.j21, r.jacobian.j22}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

std::vector<CycleRecord> read_series_csv(std::istream& in) {
  std::vector<CycleRecord> rows;
  bool header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::istringstream cells(line);
    std::vector<double> v;
    for (std::string cell; std::getline(cells, cell, ',');) v.push_back(std::stod(cell));
    if (v.size() != 10) throw std::runtime_error("series row with " + std::to_string(v.size()) + " columns");
    CycleRecord r;
    r.k = static_cast<int>(v[0]);
    r.theta = {v[1], v[2]};
    r.y = {v[3], v[4]};
    r.e = {v[5], v[6]};
    r.jacobian.j11 = v[7];
    r.jacobian.j21 = v[8];
    r.jacobian.j22 = v[9];
    rows.push_back(r);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const ExperimentConfig& cfg,
                       const std::vector<SweepCell>& cells) {
  write_metadata(out, cfg);
  out << "# statistics over k >= " << kTransientCycles + 1 << " (errors) and all k (maxima)\n";
  out << "zeta,mode,replications,mean_abs_err1,mean_abs_err2,max_G1,max_G2\n";
  for (const auto& c : cells) {
    out << format_double(c.zeta) << ',' << to_string(c.mode) << ',' << c.replications;
    for (double v : {c.mean_error[0], c.mean_error[1], c.max_output[0], c.max_output[1]}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

void write_grad_check_csv(std::ostream& out, const std::vector<GradCheckReport>& rows) {
  out << "scenario,theta1,theta2,entry,ipa,fd,abs_error,rel_error,flagged,pass\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << format_double(r.theta[0]) << ',' << format_double(r.theta[1])
        << ",j" << r.row + 1 << r.col + 1 << ',' << format_double(r.ipa) << ','
        << format_double(r.fd) << ',' << format_double(r.abs_error) << ','
        << format_double(r.rel_error) << ',' << (r.flagged ? 1 : 0) << ',' << (r.pass ? 1 : 0)
        << '\n';
  }
}

}  // namespace tandem
