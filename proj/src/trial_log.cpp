#include "ixsim/trial_log.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "ixsim/protocol.hpp"

namespace ixsim
{

namespace
{

const nlohmann::ordered_json & field(const nlohmann::ordered_json & j, const char * key)
{
  const auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  return *it;
}

template <typename T>
T typed(const nlohmann::ordered_json & j, const char * key)
{
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::type_error &) {
    throw std::invalid_argument(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

nlohmann::ordered_json record_to_json(const TrialRecord & r)
{
  nlohmann::ordered_json timers = nlohmann::ordered_json::object();
  for (const char * name : kTimerNames) {
    if (const auto v = timer_value(r.timers, name)) {
      timers[name] = r.seconds(*v);
    }
  }
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const auto & ev : r.events) {
    events.push_back(event_to_json(ev));
  }
  nlohmann::ordered_json j;
  j["trial_index"] = r.trial_index;
  j["task"] = to_string(r.task);
  j["operator"] = r.operator_label;
  j["seed"] = r.seed;
  j["dt"] = r.dt_s;
  j["outcome"] = r.outcome;
  j["timers"] = std::move(timers);
  j["ticks"] = r.ticks;
  j["macro_transit_s"] = r.seconds(r.macro_transit_ticks);
  j["events"] = std::move(events);
  return j;
}

TrialRecord record_from_json(const nlohmann::ordered_json & j)
{
  if (!j.is_object()) {
    throw std::invalid_argument("record is not a JSON object");
  }
  TrialRecord r;
  r.trial_index = typed<int>(j, "trial_index");
  r.task = task_from_string(typed<std::string>(j, "task"));
  r.operator_label = typed<std::string>(j, "operator");
  r.seed = typed<std::uint64_t>(j, "seed");
  r.dt_s = typed<double>(j, "dt");
  if (!(r.dt_s > 0.0)) {
    throw std::invalid_argument("field 'dt' must be positive");
  }
  r.outcome = typed<std::string>(j, "outcome");
  if (r.outcome != kOutcomeSuccess && r.outcome != kOutcomeTimeout) {
    failure_mode_from_string(r.outcome);
  }
  const auto to_ticks = [&](double s) { return static_cast<std::int64_t>(std::llround(s / r.dt_s)); };
  const auto & timers = field(j, "timers");
  if (!timers.is_object()) {
    throw std::invalid_argument("field 'timers' is not an object");
  }
  for (const auto & [name, value] : timers.items()) {
    if (!value.is_number()) {
      throw std::invalid_argument("timer '" + name + "' is not a number");
    }
    timer_ref(r.timers, name) = to_ticks(value.get<double>());
  }
  r.ticks = typed<std::int64_t>(j, "ticks");
  r.macro_transit_ticks = to_ticks(typed<double>(j, "macro_transit_s"));
  const auto & events = field(j, "events");
  if (!events.is_array()) {
    throw std::invalid_argument("field 'events' is not an array");
  }
  for (const auto & ev : events) {
    r.events.push_back(event_from_json(ev));
  }
  return r;
}

void write_log(std::ostream & out, const std::vector<TrialRecord> & records)
{
  for (const auto & r : records) {
    out << record_to_json(r).dump() << '\n';
  }
}

void write_log(const std::string & path, const std::vector<TrialRecord> & records)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  write_log(out, records);
  out.flush();
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

LogReadResult read_log(std::istream & in)
{
  LogReadResult result;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    try {
      result.records.push_back(record_from_json(nlohmann::ordered_json::parse(line)));
    } catch (const std::exception & e) {
      result.errors.push_back({number, e.what()});
    }
  }
  return result;
}

LogReadResult read_log(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  return read_log(in);
}

}  // namespace ixsim
