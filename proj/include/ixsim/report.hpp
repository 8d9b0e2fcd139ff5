#pragma once

#include <string>
#include <vector>

#include "ixsim/metrics.hpp"

namespace ixsim
{

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string & s);

/// One row per record with every timer in seconds (empty when absent).
std::string times_csv(const std::vector<TrialRecord> & records);

/// Per (operator, task): outcome counts and Failed-event counts per mode.
std::string failures_csv(const std::vector<TrialRecord> & records);

/// Per (operator, task): success rate pooled and per sub-module
/// (unload = detach half, install = attach half).
std::string success_csv(const std::vector<TrialRecord> & records);

/// Completion time against successful-trial index, per (operator, task).
std::string learning_curve_csv(const std::vector<TrialRecord> & records);

/// Human-readable tables of the above.
std::string summary_text(const std::vector<TrialRecord> & records);

/// Writes summary.txt, times.csv, failures.csv, success.csv and
/// learning_curve.csv into `dir`, creating it if needed. Throws IoError.
void write_report(const std::vector<TrialRecord> & records, const std::string & dir);

}  // namespace ixsim
