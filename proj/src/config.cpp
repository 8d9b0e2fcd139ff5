#include "ixsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ixsim
{

namespace
{

namespace pt = boost::property_tree;

using Slot = std::variant<double *, std::int64_t *, std::uint64_t *, Pose *>;

struct Binding
{
  const char * section;
  const char * key;
  Slot slot;
};

void bind_operator(std::vector<Binding> & b, const char * section, OperatorParams & p)
{
  b.insert(b.end(), {
    {section, "align_noise_mm0", &p.align_noise_mm0},
    {section, "align_noise_deg0", &p.align_noise_deg0},
    {section, "learn_alpha", &p.learn_alpha},
    {section, "macro_transit_mean_s", &p.macro_transit_mean_s},
    {section, "macro_transit_std_s", &p.macro_transit_std_s},
    {section, "feed_speed", &p.feed_speed},
    {section, "seed", &p.seed},
    {section, "reaction_s", &p.reaction_s},
    {section, "reaction_floor_s", &p.reaction_floor_s},
    {section, "accept_mm", &p.accept_mm},
    {section, "accept_deg", &p.accept_deg},
    {section, "landing_err_mm", &p.landing_err_mm},
    {section, "landing_err_deg", &p.landing_err_deg},
    {section, "local_speed", &p.local_speed},
    {section, "standoff_mm", &p.standoff_mm},
    {section, "forced_feed_prob0", &p.forced_feed_prob0},
    {section, "forced_feed_speed", &p.forced_feed_speed},
  });
}

std::vector<Binding> bindings(AppConfig & c)
{
  auto & sc = c.sim.scene;
  auto & lim = sc.limits;
  auto & mech = c.sim.fsm.mechanism;
  std::vector<Binding> b{
    {"scene", "home", &sc.home},
    {"scene", "bay0", &sc.bay_poses[0]},
    {"scene", "bay1", &sc.bay_poses[1]},
    {"scene", "dt_s", &sc.dt_s},
    {"scene", "max_step_mm", &lim.max_step_mm},
    {"scene", "max_step_deg", &lim.max_step_deg},
    {"scene", "slip_bias_mm", &lim.slip_bias_mm},
    {"scene", "seat_depth_mm", &lim.seat_depth_mm},
    {"scene", "capture_mm", &lim.capture_mm},
    {"mechanism", "f_lock_preload", &mech.latch.f_lock_preload},
    {"mechanism", "c_fric", &mech.latch.c_fric},
    {"mechanism", "f_normal", &mech.latch.f_normal},
    {"mechanism", "f_release", &mech.latch.f_release},
    {"mechanism", "f_residual", &mech.interface.f_residual},
    {"mechanism", "mu_interface", &mech.interface.mu_interface},
    {"mechanism", "n_interface", &mech.interface.n_interface},
    {"mechanism", "engage_trans_tol", &mech.envelope.engage_trans_tol},
    {"mechanism", "engage_tilt_tol", &mech.envelope.engage_tilt_tol},
    {"mechanism", "trigger_tilt_tol", &mech.envelope.trigger_tilt_tol},
    {"mechanism", "collision_trans_threshold", &mech.envelope.collision_trans_threshold},
    {"mechanism", "eject_trans_threshold", &mech.envelope.eject_trans_threshold},
    {"mechanism", "slip_force_threshold", &mech.envelope.slip_force_threshold},
    {"mechanism", "k_contact", &mech.k_contact},
    {"fsm", "corridor_mm", &c.sim.fsm.corridor_mm},
    {"fsm", "retract_hysteresis_mm", &c.sim.fsm.retract_hysteresis_mm},
    {"fsm", "withdraw_clearance_mm", &c.sim.fsm.withdraw_clearance_mm},
    {"harness", "tick_budget", &c.tick_budget},
  };
  bind_operator(b, "expert", c.expert);
  bind_operator(b, "novice", c.novice);
  return b;
}

template <typename T>
T parse_number(const std::string & text, const std::string & where)
{
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) {
    throw ConfigError(where + ": cannot parse '" + text + "'");
  }
  return value;
}

void assign(const Slot & slot, const std::string & text, const std::string & where)
{
  std::visit(
    [&](auto * target) {
      using T = std::remove_pointer_t<decltype(target)>;
      if constexpr (std::is_same_v<T, Pose>) {
        try {
          *target = parse_pose(text);
        } catch (const ConfigError & e) {
          throw ConfigError(where + ": " + e.what());
        }
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!text.empty() && text.front() == '-') {
          throw ConfigError(where + ": must be non-negative");
        }
        *target = parse_number<T>(text, where);
      } else {
        *target = parse_number<T>(text, where);
      }
    },
    slot);
}

/// Shortest text that reads back to the same double.
std::string shortest(double v)
{
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string render(const Slot & slot)
{
  return std::visit(
    [](auto * target) -> std::string {
      using T = std::remove_pointer_t<decltype(target)>;
      if constexpr (std::is_same_v<T, Pose>) {
        return format_pose(*target);
      } else if constexpr (std::is_same_v<T, double>) {
        return shortest(*target);
      } else {
        std::ostringstream out;
        out.precision(17);
        out << *target;
        return out.str();
      }
    },
    slot);
}

}  // namespace

Pose parse_pose(const std::string & text)
{
  std::istringstream in(text);
  Pose p;
  in >> p.x >> p.y >> p.z >> p.pitch >> p.yaw >> p.roll;
  if (!in || !(in >> std::ws).eof() || !p.is_finite()) {
    throw ConfigError("pose must be six numbers 'x y z pitch yaw roll', got '" + text + "'");
  }
  return p;
}

std::string format_pose(const Pose & p)
{
  return shortest(p.x) + ' ' + shortest(p.y) + ' ' + shortest(p.z) + ' ' + shortest(p.pitch) + ' ' +
         shortest(p.yaw) + ' ' + shortest(p.roll);
}

void validate(const AppConfig & c)
{
  new_scene(c.sim.scene);
  if (!c.sim.fsm.mechanism.valid()) {
    throw ConfigError("mechanism: parameters out of range");
  }
  const auto & f = c.sim.fsm;
  if (!(f.corridor_mm > 0.0) || !(f.retract_hysteresis_mm > 0.0) || !(f.withdraw_clearance_mm > 0.0)) {
    throw ConfigError("fsm: distances must be positive");
  }
  if (!c.expert.valid()) {
    throw ConfigError("expert: operator parameters out of range");
  }
  if (!c.novice.valid()) {
    throw ConfigError("novice: operator parameters out of range");
  }
  if (c.tick_budget < 1) {
    throw ConfigError("harness: tick_budget must be positive");
  }
}

AppConfig parse_config(std::istream & in)
{
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error & e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  AppConfig config;
  const auto table = bindings(config);
  for (const auto & [section, keys] : tree) {
    if (section == "calibration") {
      // Written by the calibrator for the record; not configuration.
      continue;
    }
    if (keys.empty() && !keys.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside any section");
    }
    for (const auto & [key, value] : keys) {
      const std::string where = section + "." + key;
      const auto it = std::find_if(table.begin(), table.end(), [&](const Binding & b) {
        return section == b.section && key == b.key;
      });
      if (it == table.end()) {
        throw ConfigError("config: unknown key '" + where + "'");
      }
      assign(it->slot, value.data(), where);
    }
  }
  validate(config);
  return config;
}

AppConfig load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config '" + path + "'");
  }
  return parse_config(in);
}

void write_config(std::ostream & out, const AppConfig & config)
{
  AppConfig copy = config;
  std::string section;
  for (const auto & b : bindings(copy)) {
    if (section != b.section) {
      if (!section.empty()) {
        out << '\n';
      }
      section = b.section;
      out << '[' << section << "]\n";
    }
    out << b.key << " = " << render(b.slot) << '\n';
  }
}

}  // namespace ixsim
