#include "ixsim/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ixsim/trial_log.hpp"

namespace ixsim
{

namespace
{

using GroupKey = std::pair<std::string, std::string>;  // operator, task

std::map<GroupKey, std::vector<const TrialRecord *>> groups(const std::vector<TrialRecord> & records)
{
  std::map<GroupKey, std::vector<const TrialRecord *>> out;
  for (const auto & r : records) {
    out[{r.operator_label, to_string(r.task)}].push_back(&r);
  }
  return out;
}

std::string fixed(double v, int decimals = 2)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

bool reached(const TrialRecord & r, Phase p)
{
  const std::string name = to_string(p);
  for (const auto & ev : r.events) {
    if (ev.kind == EventKind::PhaseEntry && ev.name == name) {
      return true;
    }
  }
  return false;
}

struct SubModuleCounts
{
  int unload_attempts = 0;
  int unload_fail = 0;
  int install_attempts = 0;
  int install_fail = 0;
  int total = 0;
  int fail = 0;
};

SubModuleCounts count_sub_modules(const std::vector<const TrialRecord *> & rs)
{
  SubModuleCounts c;
  for (const auto * r : rs) {
    ++c.total;
    c.fail += r->success() ? 0 : 1;
    bool install_attempted = r->task == TaskKind::Attach;
    if (r->task != TaskKind::Attach) {
      ++c.unload_attempts;
      if (reached(*r, Phase::Detached)) {
        install_attempted = r->task == TaskKind::FullCycle;
      } else {
        ++c.unload_fail;
      }
    }
    if (install_attempted) {
      ++c.install_attempts;
      c.install_fail += reached(*r, Phase::Attached) ? 0 : 1;
    }
  }
  return c;
}

std::string rate_or_blank(int fail, int total)
{
  return total > 0 ? fixed(success_rate(fail, total), 1) : std::string();
}

std::map<std::string, std::pair<int, int>> mode_counts(const std::vector<const TrialRecord *> & rs)
{
  std::map<std::string, std::pair<int, int>> out;
  for (const auto mode : kAllFailureModes) {
    out[to_string(mode)] = {0, 0};
  }
  out[kOutcomeTimeout] = {0, 0};
  for (const auto * r : rs) {
    if (!r->success()) {
      ++out[r->outcome].first;
    }
    for (const auto & ev : r->events) {
      if (const auto m = ev.failure()) {
        ++out[to_string(*m)].second;
      }
    }
  }
  return out;
}

void write_file(const std::filesystem::path & path, const std::string & content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    throw IoError("write to '" + path.string() + "' failed");
  }
}

}  // namespace

std::string csv_field(const std::string & s)
{
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string times_csv(const std::vector<TrialRecord> & records)
{
  std::ostringstream out;
  out << "operator,task,trial_index,seed,outcome,macro_transit_s";
  for (const char * name : kTimerNames) {
    out << ',' << name << "_s";
  }
  out << "\r\n";
  for (const auto & r : records) {
    out << csv_field(r.operator_label) << ',' << to_string(r.task) << ',' << r.trial_index << ','
        << r.seed << ',' << csv_field(r.outcome) << ',' << fixed(r.seconds(r.macro_transit_ticks));
    for (const char * name : kTimerNames) {
      out << ',';
      if (const auto v = timer_value(r.timers, name)) {
        out << fixed(r.seconds(*v));
      }
    }
    out << "\r\n";
  }
  return out.str();
}

std::string failures_csv(const std::vector<TrialRecord> & records)
{
  std::ostringstream out;
  out << "operator,task,mode,trials_with_outcome,failed_events\r\n";
  for (const auto & [key, rs] : groups(records)) {
    for (const auto & [mode, counts] : mode_counts(rs)) {
      out << csv_field(key.first) << ',' << key.second << ',' << mode << ',' << counts.first << ','
          << counts.second << "\r\n";
    }
  }
  return out.str();
}

std::string success_csv(const std::vector<TrialRecord> & records)
{
  std::ostringstream out;
  out << "operator,task,scope,attempts,failures,success_rate\r\n";
  for (const auto & [key, rs] : groups(records)) {
    const auto c = count_sub_modules(rs);
    const auto row = [&](const char * scope, int attempts, int fails) {
      out << csv_field(key.first) << ',' << key.second << ',' << scope << ',' << attempts << ','
          << fails << ',' << rate_or_blank(fails, attempts) << "\r\n";
    };
    row("pooled", c.total, c.fail);
    row("unload", c.unload_attempts, c.unload_fail);
    row("install", c.install_attempts, c.install_fail);
  }
  return out.str();
}

std::string learning_curve_csv(const std::vector<TrialRecord> & records)
{
  std::ostringstream out;
  out << "operator,task,success_index,trial_index,total_s,t_install_s,macro_transit_s\r\n";
  for (const auto & [key, rs] : groups(records)) {
    int index = 0;
    for (const auto * r : rs) {
      const auto total = r->total_s();
      if (!r->success() || !total) {
        continue;
      }
      out << csv_field(key.first) << ',' << key.second << ',' << ++index << ',' << r->trial_index
          << ',' << fixed(*total) << ',';
      if (r->timers.t_install) {
        out << fixed(r->seconds(*r->timers.t_install));
      }
      out << ',' << fixed(r->seconds(r->macro_transit_ticks)) << "\r\n";
    }
  }
  return out.str();
}

std::string summary_text(const std::vector<TrialRecord> & records)
{
  std::ostringstream out;
  out << "Trials: " << records.size() << "\n";
  for (const auto & [key, rs] : groups(records)) {
    std::vector<TrialRecord> copy;
    for (const auto * r : rs) {
      copy.push_back(*r);
    }
    const auto s = summarize(copy, std::nullopt);
    const auto c = count_sub_modules(rs);
    out << "\n== " << key.first << " / " << key.second << " ==\n";
    out << "trials " << s.n_total << ", failures " << s.n_fail << ", success rate "
        << fixed(s.p_success, 1) << " %\n";
    if (c.unload_attempts > 0) {
      out << "  unload  " << c.unload_attempts - c.unload_fail << "/" << c.unload_attempts << " ("
          << rate_or_blank(c.unload_fail, c.unload_attempts) << " %)\n";
    }
    if (c.install_attempts > 0) {
      out << "  install " << c.install_attempts - c.install_fail << "/" << c.install_attempts << " ("
          << rate_or_blank(c.install_fail, c.install_attempts) << " %)\n";
    }
    out << "\n  timer                  n     mean_s      std_s\n";
    for (const char * name : kTimerNames) {
      const auto & st = s.timers.at(name);
      if (st.n == 0) {
        continue;
      }
      char line[128];
      std::snprintf(line, sizeof(line), "  %-18s %5d %10.2f %10.2f\n", name, st.n, st.mean_s, st.std_s);
      out << line;
    }
    out << "\n  failure mode                 outcome  events\n";
    for (const auto & [mode, counts] : mode_counts(rs)) {
      char line[128];
      std::snprintf(line, sizeof(line), "  %-28s %7d %7d\n", mode.c_str(), counts.first, counts.second);
      out << line;
    }
  }
  return out.str();
}

void write_report(const std::vector<TrialRecord> & records, const std::string & dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create '" + dir + "': " + ec.message());
  }
  const std::filesystem::path root(dir);
  write_file(root / "summary.txt", summary_text(records));
  write_file(root / "times.csv", times_csv(records));
  write_file(root / "failures.csv", failures_csv(records));
  write_file(root / "success.csv", success_csv(records));
  write_file(root / "learning_curve.csv", learning_curve_csv(records));
}

}  // namespace ixsim
