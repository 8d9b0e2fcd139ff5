#include "ixsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ixsim
{

namespace
{

std::optional<std::int64_t> first_entry(const TrialEvents & events, Phase phase)
{
  const std::string name = to_string(phase);
  for (const auto & ev : events) {
    if (ev.kind == EventKind::PhaseEntry && ev.name == name) {
      return ev.tick;
    }
  }
  return std::nullopt;
}

std::optional<std::int64_t> span(
  const std::optional<std::int64_t> & from, const std::optional<std::int64_t> & to)
{
  if (!from || !to) {
    return std::nullopt;
  }
  return *to - *from;
}

std::optional<std::int64_t> sum3(
  const std::optional<std::int64_t> & a, const std::optional<std::int64_t> & b,
  const std::optional<std::int64_t> & c)
{
  if (!a || !b || !c) {
    return std::nullopt;
  }
  return *a + *b + *c;
}

std::vector<double> average_ranks(const std::vector<double> & v)
{
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
      ++j;
    }
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) {
      ranks[order[m]] = rank;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<std::int64_t> & timer_ref(PhaseTimers & t, const std::string & name)
{
  if (name == "t_move_return") return t.t_move_return;
  if (name == "t_trigger_release") return t.t_trigger_release;
  if (name == "t_withdraw") return t.t_withdraw;
  if (name == "t_align") return t.t_align;
  if (name == "t_feed") return t.t_feed;
  if (name == "t_lock") return t.t_lock;
  if (name == "t_unload") return t.t_unload;
  if (name == "t_install") return t.t_install;
  if (name == "t_exchange") return t.t_exchange;
  throw std::invalid_argument("unknown timer '" + name + "'");
}

std::optional<std::int64_t> timer_value(const PhaseTimers & t, const std::string & name)
{
  return timer_ref(const_cast<PhaseTimers &>(t), name);
}

PhaseTimers derive_timers(const TrialEvents & events)
{
  PhaseTimers t;
  const auto returning = first_entry(events, Phase::Returning);
  const auto inserting = first_entry(events, Phase::Inserting);
  const auto withdrawing_empty = first_entry(events, Phase::WithdrawingEmpty);
  const auto detached = first_entry(events, Phase::Detached);
  const auto aligning = first_entry(events, Phase::Aligning);
  const auto feeding = first_entry(events, Phase::Feeding);
  const auto locked = first_entry(events, Phase::Locked);
  const auto attached = first_entry(events, Phase::Attached);

  t.t_move_return = span(returning, inserting);
  t.t_trigger_release = span(inserting, withdrawing_empty);
  t.t_withdraw = span(withdrawing_empty, detached);
  t.t_align = span(aligning, feeding);
  t.t_feed = span(feeding, locked);
  t.t_lock = span(locked, attached);
  t.t_unload = sum3(t.t_move_return, t.t_trigger_release, t.t_withdraw);
  t.t_install = sum3(t.t_align, t.t_feed, t.t_lock);
  if (t.t_unload && t.t_install) {
    t.t_exchange = *t.t_unload + *t.t_install;
  }
  return t;
}

std::optional<std::int64_t> TrialRecord::total_ticks() const
{
  switch (task) {
    case TaskKind::Attach:
      return timers.t_install;
    case TaskKind::Detach:
      return timers.t_unload;
    case TaskKind::FullCycle:
      return timers.t_exchange;
  }
  return std::nullopt;
}

std::optional<double> TrialRecord::total_s() const
{
  const auto t = total_ticks();
  if (!t) {
    return std::nullopt;
  }
  return seconds(*t);
}

TrialRecord run_trial(const TrialSpec & spec)
{
  SimConfig sim_cfg = spec.sim;
  sim_cfg.scene = scene_for_task(spec.sim.scene, spec.task);
  Simulation sim(sim_cfg, spec.task);
  OperatorPolicy policy(spec.op, sim_cfg.scene.dt_s);
  policy.begin_trial(spec.k, spec.seed);

  StateUpdate obs = sim.snapshot();
  std::uint64_t idle_seq = 0;
  for (int i = 0; i < spec.idle_lead_in && sim.scene().tick < spec.tick_budget; ++i) {
    PoseCommand hold;
    hold.seq = ++idle_seq;
    obs = sim.step(hold);
  }
  while (!sim.fsm().terminal() && sim.scene().tick < spec.tick_budget) {
    PoseCommand cmd = policy.next_command(obs);
    cmd.seq += idle_seq;
    obs = sim.step(cmd);
  }

  TrialRecord rec;
  rec.trial_index = spec.k;
  rec.task = spec.task;
  rec.operator_label = spec.op.label;
  rec.seed = spec.seed;
  rec.dt_s = sim_cfg.scene.dt_s;
  rec.ticks = sim.scene().tick;
  rec.macro_transit_ticks = policy.macro_transit_ticks();
  for (const auto & ev : sim.events()) {
    if (ev.kind != EventKind::Command) {
      rec.events.push_back(ev);
    }
  }
  if (const auto mode = classify_failure(sim.events())) {
    rec.outcome = to_string(*mode);
  } else if (sim.fsm().succeeded()) {
    rec.outcome = kOutcomeSuccess;
  } else {
    rec.outcome = kOutcomeTimeout;
  }
  rec.timers = derive_timers(sim.events());
  return rec;
}

std::uint64_t trial_seed(std::uint64_t batch_seed, int i)
{
  // Hash the batch seed first so neighbouring batch seeds do not share
  // shifted copies of the same trial stream.
  return splitmix64(splitmix64(batch_seed) + static_cast<std::uint64_t>(i));
}

BatchResult run_batch(const BatchSpec & spec)
{
  if (spec.n_trials < 1) {
    throw std::invalid_argument("run_batch: n_trials must be at least 1");
  }
  BatchResult result;
  result.records.reserve(static_cast<std::size_t>(spec.n_trials));
  for (int i = 0; i < spec.n_trials; ++i) {
    TrialSpec ts;
    ts.task = spec.task;
    ts.op = spec.op;
    ts.k = i + 1;
    ts.seed = trial_seed(spec.seed, i);
    ts.sim = spec.sim;
    ts.tick_budget = spec.tick_budget;
    result.records.push_back(run_trial(ts));
  }
  result.summary = summarize(result.records, spec.baseline_s);
  return result;
}

BatchSummary summarize(const std::vector<TrialRecord> & records, std::optional<double> baseline_s)
{
  BatchSummary s;
  s.n_total = static_cast<int>(records.size());
  for (const auto & r : records) {
    if (!r.success()) {
      ++s.n_fail;
      ++s.outcome_counts[r.outcome];
    }
    for (const auto & ev : r.events) {
      if (const auto mode = ev.failure()) {
        ++s.failure_events[to_string(*mode)];
      }
    }
  }
  s.p_success = s.n_total > 0 ? success_rate(s.n_fail, s.n_total) : 0.0;

  for (const char * name : kTimerNames) {
    std::vector<double> xs;
    for (const auto & r : records) {
      if (const auto v = timer_value(r.timers, name)) {
        xs.push_back(r.seconds(*v));
      }
    }
    TimerStats st;
    st.n = static_cast<int>(xs.size());
    if (!xs.empty()) {
      st.mean_s = std::accumulate(xs.begin(), xs.end(), 0.0) / st.n;
    }
    if (st.n >= 2) {
      double ss = 0.0;
      for (double x : xs) {
        ss += (x - st.mean_s) * (x - st.mean_s);
      }
      st.std_s = std::sqrt(ss / (st.n - 1));
    }
    s.timers[name] = st;
  }
  if (baseline_s) {
    s.rounds_to_baseline = rounds_to_baseline(records, *baseline_s);
  }
  return s;
}

double success_rate(int n_fail, int n_total)
{
  if (n_total < 1) {
    throw std::invalid_argument("success_rate: n_total must be at least 1");
  }
  if (n_fail < 0 || n_fail > n_total) {
    throw std::invalid_argument("success_rate: n_fail must lie in [0, n_total]");
  }
  return (1.0 - static_cast<double>(n_fail) / n_total) * 100.0;
}

std::optional<int> first_at_or_below(
  const std::vector<std::optional<double>> & times, double baseline_s)
{
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] && *times[i] <= baseline_s) {
      return static_cast<int>(i) + 1;
    }
  }
  return std::nullopt;
}

std::optional<int> rounds_to_baseline(const std::vector<TrialRecord> & records, double baseline_s)
{
  for (const auto & r : records) {
    if (!r.success()) {
      continue;
    }
    const auto t = r.total_s();
    if (t && *t <= baseline_s) {
      return r.trial_index;
    }
  }
  return std::nullopt;
}

double spearman(const std::vector<double> & x, const std::vector<double> & y)
{
  if (x.size() != y.size()) {
    throw std::invalid_argument("spearman: series lengths differ");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace ixsim
