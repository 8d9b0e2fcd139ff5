#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ixsim/exchange_fsm.hpp"
#include "ixsim/operators.hpp"
#include "ixsim/simulation.hpp"

namespace ixsim
{

/// Sub-phase durations in ticks, present only for phases the trial completed.
struct PhaseTimers
{
  std::optional<std::int64_t> t_move_return;
  std::optional<std::int64_t> t_trigger_release;
  std::optional<std::int64_t> t_withdraw;
  std::optional<std::int64_t> t_align;
  std::optional<std::int64_t> t_feed;
  std::optional<std::int64_t> t_lock;
  std::optional<std::int64_t> t_unload;
  std::optional<std::int64_t> t_install;
  std::optional<std::int64_t> t_exchange;

  friend bool operator==(const PhaseTimers &, const PhaseTimers &) = default;
};

inline constexpr const char * kTimerNames[] = {
  "t_move_return", "t_trigger_release", "t_withdraw", "t_align", "t_feed",
  "t_lock",        "t_unload",          "t_install",  "t_exchange"};

std::optional<std::int64_t> & timer_ref(PhaseTimers & t, const std::string & name);
std::optional<std::int64_t> timer_value(const PhaseTimers & t, const std::string & name);

/// Derives the timers from phase-entry events. The clock starts at the
/// first movement command; idle ticks before it are never counted.
PhaseTimers derive_timers(const TrialEvents & events);

inline constexpr const char * kOutcomeSuccess = "success";
inline constexpr const char * kOutcomeTimeout = "timeout";

struct TrialRecord
{
  int trial_index = 1;
  TaskKind task = TaskKind::FullCycle;
  std::string operator_label;
  std::uint64_t seed = 0;
  double dt_s = 0.01;
  std::string outcome = kOutcomeSuccess;  ///< "success", a failure mode name or "timeout"
  PhaseTimers timers;
  std::int64_t ticks = 0;                 ///< ticks simulated, idle lead-in included
  std::int64_t macro_transit_ticks = 0;   ///< ticks of the long move to the repository
  TrialEvents events;                     ///< phase and mechanism events

  bool success() const { return outcome == kOutcomeSuccess; }
  /// Completion time of the whole task: t_install, t_unload or t_exchange.
  std::optional<std::int64_t> total_ticks() const;
  std::optional<double> total_s() const;
  /// Divides by the tick rate so that e.g. 756 ticks at 10 ms print as 7.56.
  double seconds(std::int64_t ticks_) const { return static_cast<double>(ticks_) / (1.0 / dt_s); }

  friend bool operator==(const TrialRecord &, const TrialRecord &) = default;
};

/// Default per-trial budget: 600 s of simulated time.
inline constexpr std::int64_t kDefaultTickBudget = 60000;

struct TrialSpec
{
  TaskKind task = TaskKind::FullCycle;
  OperatorParams op;
  int k = 1;                    ///< practice index handed to the policy
  std::uint64_t seed = 0;
  SimConfig sim;
  std::int64_t tick_budget = kDefaultTickBudget;
  /// Zero-delta commands sent before the policy takes over.
  int idle_lead_in = 0;
};

/// One trial through the in-process session loop.
TrialRecord run_trial(const TrialSpec & spec);

struct TimerStats
{
  int n = 0;
  double mean_s = 0.0;
  double std_s = 0.0;  ///< sample standard deviation, 0 for n < 2
};

struct BatchSummary
{
  int n_total = 0;
  int n_fail = 0;
  double p_success = 0.0;
  std::map<std::string, TimerStats> timers;
  /// Outcome counts per failure mode and timeout.
  std::map<std::string, int> outcome_counts;
  /// Failed events per mode, including secondary modes of the same trial.
  std::map<std::string, int> failure_events;
  std::optional<int> rounds_to_baseline;
};

struct BatchSpec
{
  TaskKind task = TaskKind::FullCycle;
  OperatorParams op;
  int n_trials = 20;
  std::uint64_t seed = 0;
  SimConfig sim;
  std::int64_t tick_budget = kDefaultTickBudget;
  std::optional<double> baseline_s;
};

struct BatchResult
{
  std::vector<TrialRecord> records;
  BatchSummary summary;
};

/// Seed of trial i (0-based) in a batch seeded with `batch_seed`.
std::uint64_t trial_seed(std::uint64_t batch_seed, int i);

/// Runs trials 1..n with derived seeds; the practice index advances per trial.
BatchResult run_batch(const BatchSpec & spec);

BatchSummary summarize(const std::vector<TrialRecord> & records, std::optional<double> baseline_s);

/// Percentage of successful trials. Throws std::invalid_argument when
/// n_total < 1 or n_fail is outside [0, n_total].
double success_rate(int n_fail, int n_total);

/// 1-based index of the first time at or below the baseline; failed trials
/// (nullopt) are skipped.
std::optional<int> first_at_or_below(const std::vector<std::optional<double>> & times, double baseline_s);

/// trial_index of the first successful record whose completion time is at
/// or below the baseline.
std::optional<int> rounds_to_baseline(const std::vector<TrialRecord> & records, double baseline_s);

/// Spearman rank correlation with tied values given their average rank.
/// NaN when fewer than two points or either series is constant.
double spearman(const std::vector<double> & x, const std::vector<double> & y);

}  // namespace ixsim
