#include "ixsim/protocol.hpp"

#include <cmath>

namespace ixsim
{

namespace
{

void require_finite(double v, const char * field)
{
  if (!std::isfinite(v)) {
    throw EncodeError(std::string("non-finite value in field '") + field + "'");
  }
}

void require_finite(const Pose & p, const char * field)
{
  if (!p.is_finite()) {
    throw EncodeError(std::string("non-finite pose in field '") + field + "'");
  }
}

ordered_json optional_int(const std::optional<int> & v)
{
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

// Field access that reports the field name on failure.
const ordered_json & field(const ordered_json & j, const char * name)
{
  const auto it = j.find(name);
  if (it == j.end()) {
    throw std::invalid_argument(std::string("missing field '") + name + "'");
  }
  return *it;
}

double number(const ordered_json & j, const char * name)
{
  const auto & v = field(j, name);
  if (!v.is_number()) {
    throw std::invalid_argument(std::string("field '") + name + "' is not a number");
  }
  return v.get<double>();
}

std::uint64_t unsigned_number(const ordered_json & j, const char * name)
{
  const auto & v = field(j, name);
  const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) {
    throw std::invalid_argument(std::string("field '") + name + "' is not a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::int64_t integer(const ordered_json & j, const char * name)
{
  const auto & v = field(j, name);
  if (!v.is_number_integer()) {
    throw std::invalid_argument(std::string("field '") + name + "' is not an integer");
  }
  return v.get<std::int64_t>();
}

std::string text(const ordered_json & j, const char * name)
{
  const auto & v = field(j, name);
  if (!v.is_string()) {
    throw std::invalid_argument(std::string("field '") + name + "' is not a string");
  }
  return v.get<std::string>();
}

bool boolean(const ordered_json & j, const char * name)
{
  const auto & v = field(j, name);
  if (!v.is_boolean()) {
    throw std::invalid_argument(std::string("field '") + name + "' is not a boolean");
  }
  return v.get<bool>();
}

std::optional<int> nullable_int(const ordered_json & j, const char * name)
{
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) {
    return std::nullopt;
  }
  return static_cast<int>(integer(j, name));
}

ordered_json hello_json(const Hello & m)
{
  return {{"type", "hello"}, {"session_id", m.session_id}, {"task", m.task}, {"seed", m.seed}};
}

ordered_json command_json(const PoseCommand & m)
{
  require_finite(m.delta, "delta");
  require_finite(m.axial_feed, "axial_feed");
  require_finite(m.client_time_ms, "client_time_ms");
  return {
    {"type", "cmd"},
    {"seq", m.seq},
    {"session_id", m.session_id},
    {"client_time_ms", m.client_time_ms},
    {"delta", pose_to_json(m.delta)},
    {"axial_feed", m.axial_feed},
  };
}

ordered_json state_json(const StateUpdate & m)
{
  require_finite(m.sim_time, "sim_time");
  require_finite(m.arm_tip, "arm_tip");
  require_finite(m.alignment.trans_mm, "alignment");
  require_finite(m.alignment.tilt_deg, "alignment");
  ordered_json bays = ordered_json::array();
  for (const auto & b : m.bays) {
    require_finite(b.slot_pose, "bays.slot_pose");
    bays.push_back({
      {"id", b.id},
      {"slot_pose", pose_to_json(b.slot_pose)},
      {"occupied_by", optional_int(b.occupied_by)},
      {"limit_switch_pressed", b.limit_switch_pressed},
      {"seat_depth_mm", b.seat_depth_mm},
    });
  }
  ordered_json instruments = ordered_json::array();
  for (const auto & i : m.instruments) {
    require_finite(i.base_pose, "instruments.base_pose");
    instruments.push_back({
      {"id", i.id},
      {"location", to_string(i.location)},
      {"bay", i.bay},
      {"base_pose", pose_to_json(i.base_pose)},
    });
  }
  ordered_json events = ordered_json::array();
  for (const auto & e : m.events_since_last) {
    events.push_back(event_to_json(e));
  }
  return {
    {"type", "state"},
    {"seq", m.seq},
    {"sim_time", m.sim_time},
    {"tick", m.tick},
    {"arm_tip", pose_to_json(m.arm_tip)},
    {"phase", to_string(m.phase)},
    {"failure", m.failure ? ordered_json(to_string(*m.failure)) : ordered_json(nullptr)},
    {"target_bay", m.target_bay},
    {"alignment", {{"trans_err_mm", m.alignment.trans_mm}, {"tilt_err_deg", m.alignment.tilt_deg}}},
    {"bays", std::move(bays)},
    {"instruments", std::move(instruments)},
    {"events_since_last", std::move(events)},
    {"base_stable", m.base_stable},
  };
}

ordered_json error_json(const ErrorFrame & m)
{
  return {{"type", "err"}, {"code", m.code}, {"message", m.message}};
}

Hello hello_from(const ordered_json & j)
{
  Hello m;
  if (const auto it = j.find("session_id"); it != j.end() && !it->is_null()) {
    m.session_id = text(j, "session_id");
  }
  if (j.contains("task")) {
    m.task = text(j, "task");
  }
  if (j.contains("seed")) {
    m.seed = unsigned_number(j, "seed");
  }
  return m;
}

PoseCommand command_from(const ordered_json & j)
{
  PoseCommand m;
  m.seq = unsigned_number(j, "seq");
  m.session_id = text(j, "session_id");
  if (j.contains("client_time_ms")) {
    m.client_time_ms = number(j, "client_time_ms");
  }
  m.delta = pose_from_json(field(j, "delta"));
  m.axial_feed = j.contains("axial_feed") ? number(j, "axial_feed") : 0.0;
  if (!m.is_finite()) {
    throw std::invalid_argument("non-finite command field");
  }
  return m;
}

StateUpdate state_from(const ordered_json & j)
{
  StateUpdate m;
  m.seq = unsigned_number(j, "seq");
  m.sim_time = number(j, "sim_time");
  m.tick = integer(j, "tick");
  m.arm_tip = pose_from_json(field(j, "arm_tip"));
  m.phase = phase_from_string(text(j, "phase"));
  if (const auto it = j.find("failure"); it != j.end() && !it->is_null()) {
    m.failure = failure_mode_from_string(text(j, "failure"));
  }
  m.target_bay = static_cast<int>(integer(j, "target_bay"));
  const auto & al = field(j, "alignment");
  m.alignment = {number(al, "trans_err_mm"), number(al, "tilt_err_deg")};
  for (const auto & b : field(j, "bays")) {
    m.bays.push_back({
      static_cast<int>(integer(b, "id")),
      pose_from_json(field(b, "slot_pose")),
      nullable_int(b, "occupied_by"),
      boolean(b, "limit_switch_pressed"),
      number(b, "seat_depth_mm"),
    });
  }
  for (const auto & i : field(j, "instruments")) {
    m.instruments.push_back({
      static_cast<int>(integer(i, "id")),
      instrument_location_from_string(text(i, "location")),
      static_cast<int>(integer(i, "bay")),
      pose_from_json(field(i, "base_pose")),
    });
  }
  for (const auto & e : field(j, "events_since_last")) {
    m.events_since_last.push_back(event_from_json(e));
  }
  m.base_stable = boolean(j, "base_stable");
  return m;
}

ErrorFrame error_from(const ordered_json & j)
{
  ErrorFrame m;
  m.code = text(j, "code");
  if (j.contains("message")) {
    m.message = text(j, "message");
  }
  return m;
}

}  // namespace

ordered_json pose_to_json(const Pose & p)
{
  return {{"x", p.x}, {"y", p.y}, {"z", p.z}, {"pitch", p.pitch}, {"yaw", p.yaw}, {"roll", p.roll}};
}

Pose pose_from_json(const ordered_json & j)
{
  if (!j.is_object()) {
    throw std::invalid_argument("pose is not an object");
  }
  Pose p;
  p.x = number(j, "x");
  p.y = number(j, "y");
  p.z = number(j, "z");
  p.pitch = number(j, "pitch");
  p.yaw = number(j, "yaw");
  p.roll = number(j, "roll");
  return p;
}

ordered_json event_to_json(const TrialEvent & e)
{
  require_finite(e.sim_time, "events.t");
  return {
    {"tick", e.tick},
    {"t", e.sim_time},
    {"kind", to_string(e.kind)},
    {"name", e.name},
    {"payload", e.payload},
  };
}

TrialEvent event_from_json(const ordered_json & j)
{
  TrialEvent e;
  e.tick = integer(j, "tick");
  e.sim_time = number(j, "t");
  e.kind = event_kind_from_string(text(j, "kind"));
  e.name = text(j, "name");
  if (const auto it = j.find("payload"); it != j.end() && it->is_object()) {
    e.payload = *it;
  }
  return e;
}

ordered_json to_json(const Message & msg)
{
  return std::visit(
    [](const auto & m) -> ordered_json {
      using T = std::decay_t<decltype(m)>;
      if constexpr (std::is_same_v<T, Hello>) {
        return hello_json(m);
      } else if constexpr (std::is_same_v<T, PoseCommand>) {
        return command_json(m);
      } else if constexpr (std::is_same_v<T, StateUpdate>) {
        return state_json(m);
      } else {
        return error_json(m);
      }
    },
    msg);
}

std::string encode(const Message & msg)
{
  std::string out = to_json(msg).dump();
  out.push_back('\n');
  return out;
}

FrameResult decode_line(std::string_view line)
{
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  try {
    const ordered_json j = ordered_json::parse(line);
    if (!j.is_object()) {
      return FrameError{std::string(line), "frame is not a JSON object"};
    }
    const std::string type = text(j, "type");
    if (type == "hello") {
      return Message{hello_from(j)};
    }
    if (type == "cmd") {
      return Message{command_from(j)};
    }
    if (type == "state") {
      return Message{state_from(j)};
    }
    if (type == "err") {
      return Message{error_from(j)};
    }
    return FrameError{std::string(line), "unknown frame type '" + type + "'"};
  } catch (const std::exception & e) {
    return FrameError{std::string(line), e.what()};
  }
}

DecodeOutput decode(std::string_view buffer)
{
  DecodeOutput out;
  std::size_t start = 0;
  while (true) {
    const std::size_t lf = buffer.find('\n', start);
    if (lf == std::string_view::npos) {
      break;
    }
    const std::string_view line = buffer.substr(start, lf - start);
    start = lf + 1;
    if (line.empty() || line == "\r") {
      continue;
    }
    out.frames.push_back(decode_line(line));
  }
  out.remaining = std::string(buffer.substr(start));
  return out;
}

std::vector<FrameResult> FrameDecoder::feed(std::string_view bytes)
{
  buffer_.append(bytes);
  DecodeOutput out = decode(buffer_);
  buffer_ = std::move(out.remaining);
  return std::move(out.frames);
}

std::vector<std::string> FrameDecoder::feed_lines(std::string_view bytes)
{
  buffer_.append(bytes);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    const std::size_t lf = buffer_.find('\n', start);
    if (lf == std::string::npos) {
      break;
    }
    if (lf > start) {
      lines.emplace_back(buffer_, start, lf - start);
    }
    start = lf + 1;
  }
  buffer_.erase(0, start);
  return lines;
}

}  // namespace ixsim
