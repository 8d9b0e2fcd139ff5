#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ixsim/config.hpp"

namespace ixsim
{

/// Target mean full-cycle times and the search grid over the macro transit
/// mean. The transit std scales with the mean, keeping each operator's
/// coefficient of variation from the base parameters.
struct CalibrationTargets
{
  double expert_cycle_s = 48.0;
  double novice_cycle_s = 98.0;
  double tolerance = 0.15;  ///< relative
  int trials = 20;          ///< trials per batch
  int batches = 10;         ///< batches per grid point, seeded seed, seed + 1, ...
  std::uint64_t seed = 1;
  double macro_min_s = 0.0;
  double macro_max_s = 120.0;
  double macro_step_s = 2.0;

  bool valid() const;
};

/// Reads targets from INI, section [targets] and optional [grid]. Throws
/// ConfigError.
CalibrationTargets parse_targets(std::istream & in);
CalibrationTargets load_targets(const std::string & path);

struct GridPoint
{
  double macro_mean_s = 0.0;
  double cycle_mean_s = 0.0;  ///< pooled over all batches, NaN when no trial succeeded
  std::vector<double> batch_means_s;  ///< one per batch, NaN for a batch without a success
  int successes = 0;
};

struct OperatorFit
{
  OperatorParams params;
  GridPoint best;
  std::vector<GridPoint> grid;
  bool within_tolerance = false;
};

struct CalibrationResult
{
  CalibrationTargets targets;
  OperatorFit expert;
  OperatorFit novice;
  AppConfig config;  ///< base config with the fitted operators
};

class CalibrationError : public std::runtime_error
{
public:
  CalibrationError(const std::string & message, CalibrationResult partial)
  : std::runtime_error(message), result(std::move(partial))
  {
  }
  CalibrationResult result;
};

/// Grid search per operator for the macro transit mean that keeps every
/// batch's full-cycle mean (`batches` batches of `trials` trials) closest to
/// the target, judged by the worst batch. A coarse pass every fourth grid step is refined at full
/// resolution around its best point. Throws CalibrationError,
/// naming the best means achieved, when either operator misses its
/// tolerance band.
CalibrationResult calibrate(const CalibrationTargets & targets, const AppConfig & base);

/// Fitted config followed by a [calibration] section with the achieved means.
void write_calibration_report(std::ostream & out, const CalibrationResult & result);

}  // namespace ixsim
