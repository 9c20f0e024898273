#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tandem/experiment.hpp"
#include "tandem/oracle.hpp"

namespace tandem {

/// Version string written into every CSV metadata block.
std::string build_version();

/// `%.17g`: enough digits for a double to read back bit-identically.
std::string format_double(double v);

/// RunSeries as CSV: a `#` metadata block (version, generator, seed,
/// replication, mode, initial gain, then every config key), a header line and
/// one row per control cycle:
///   k,theta1,theta2,G1,G2,e1,e2,j11,j21,j22
void write_series_csv(std::ostream& out, const RunSeries& series);

/// Reads the rows of a series CSV back. Only the columns above are restored.
std::vector<CycleRecord> read_series_csv(std::istream& in);

/// zeta,mode,replications,mean_abs_err1,mean_abs_err2,max_G1,max_G2
void write_summary_csv(std::ostream& out, const ExperimentConfig& cfg,
                       const std::vector<SweepCell>& cells);

/// scenario,theta1,theta2,entry,ipa,fd,abs_error,rel_error,flagged,pass
void write_grad_check_csv(std::ostream& out, const std::vector<GradCheckReport>& rows);

}  // namespace tandem
