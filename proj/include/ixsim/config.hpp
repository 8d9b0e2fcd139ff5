#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "ixsim/metrics.hpp"
#include "ixsim/operators.hpp"
#include "ixsim/simulation.hpp"

namespace ixsim
{

/// Everything a run or a server needs besides the command line.
struct AppConfig
{
  SimConfig sim;
  OperatorParams expert = expert_defaults();
  OperatorParams novice = novice_defaults();
  std::int64_t tick_budget = kDefaultTickBudget;
};

/// Reads an INI document. Keys left out keep their defaults; unknown
/// sections or keys, unparsable values and out-of-range parameters throw
/// ConfigError.
AppConfig parse_config(std::istream & in);
AppConfig load_config(const std::string & path);

/// Writes every key, so the output is a complete, loadable config.
void write_config(std::ostream & out, const AppConfig & config);

/// Throws ConfigError when any part of the configuration is out of range.
void validate(const AppConfig & config);

/// "x y z pitch yaw roll"
Pose parse_pose(const std::string & text);
std::string format_pose(const Pose & p);

}  // namespace ixsim
