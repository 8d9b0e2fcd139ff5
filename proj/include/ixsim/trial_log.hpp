#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ixsim/metrics.hpp"

namespace ixsim
{

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct LogLineError
{
  int line = 0;  ///< 1-based
  std::string message;

  friend bool operator==(const LogLineError &, const LogLineError &) = default;
};

struct LogReadResult
{
  std::vector<TrialRecord> records;
  std::vector<LogLineError> errors;
};

nlohmann::ordered_json record_to_json(const TrialRecord & r);
/// Throws std::invalid_argument on missing or mistyped fields.
TrialRecord record_from_json(const nlohmann::ordered_json & j);

/// One JSON object per record, LF-terminated.
void write_log(std::ostream & out, const std::vector<TrialRecord> & records);
void write_log(const std::string & path, const std::vector<TrialRecord> & records);

/// Parses every line; a bad line is reported with its number and skipped.
/// Blank lines are ignored.
LogReadResult read_log(std::istream & in);
LogReadResult read_log(const std::string & path);

}  // namespace ixsim
