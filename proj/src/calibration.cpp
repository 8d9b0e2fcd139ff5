#include "ixsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ixsim
{

namespace
{

namespace pt = boost::property_tree;

template <typename T>
void read_key(const pt::ptree & section, const std::string & name, const char * key, T & out)
{
  const auto v = section.get_optional<std::string>(key);
  if (!v) {
    return;
  }
  std::istringstream in(*v);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) {
    throw ConfigError(name + "." + key + ": cannot parse '" + *v + "'");
  }
  out = value;
}

void reject_unknown(const pt::ptree & section, const std::string & name,
                    std::initializer_list<const char *> known)
{
  for (const auto & [key, value] : section) {
    bool ok = false;
    for (const char * k : known) {
      ok = ok || key == k;
    }
    if (!ok) {
      throw ConfigError("targets: unknown key '" + name + "." + key + "'");
    }
  }
}

GridPoint evaluate(const OperatorParams & op, const CalibrationTargets & t, const AppConfig & base)
{
  GridPoint g;
  double sum = 0.0;
  int n = 0;
  for (int b = 0; b < t.batches; ++b) {
    BatchSpec spec;
    spec.task = TaskKind::FullCycle;
    spec.op = op;
    spec.n_trials = t.trials;
    spec.seed = t.seed + static_cast<std::uint64_t>(b);
    spec.sim = base.sim;
    spec.tick_budget = base.tick_budget;
    const auto st = run_batch(spec).summary.timers.at("t_exchange");
    sum += st.mean_s * st.n;
    n += st.n;
    g.batch_means_s.push_back(st.n > 0 ? st.mean_s : std::numeric_limits<double>::quiet_NaN());
  }
  g.macro_mean_s = op.macro_transit_mean_s;
  g.successes = n;
  g.cycle_mean_s = n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
  return g;
}

/// Largest distance of any batch mean from the target; infinite when a
/// batch had no successful trial.
double worst_gap(const GridPoint & g, double target_s)
{
  double worst = 0.0;
  for (double m : g.batch_means_s) {
    worst = std::max(worst, std::abs(m - target_s));
  }
  return std::isfinite(worst) && !g.batch_means_s.empty() ? worst
                                                          : std::numeric_limits<double>::infinity();
}

OperatorFit fit(const OperatorParams & base_op, double target_s, const CalibrationTargets & t,
                const AppConfig & base)
{
  const double cv = base_op.macro_transit_mean_s > 0.0
                      ? base_op.macro_transit_std_s / base_op.macro_transit_mean_s
                      : 0.0;
  OperatorFit out;
  double best_gap = std::numeric_limits<double>::infinity();
  // Grid indices in units of macro_step_s; each point is simulated once.
  std::map<int, GridPoint> seen;
  const auto visit = [&](int i) {
    if (seen.count(i) != 0) {
      return;
    }
    OperatorParams op = base_op;
    op.macro_transit_mean_s = t.macro_min_s + i * t.macro_step_s;
    op.macro_transit_std_s = cv * op.macro_transit_mean_s;
    const GridPoint g = evaluate(op, t, base);
    seen.emplace(i, g);
    const double gap = worst_gap(g, target_s);
    if (std::isfinite(gap) && gap < best_gap) {
      best_gap = gap;
      out.best = g;
      out.params = op;
    }
  };
  const int steps = static_cast<int>(std::floor((t.macro_max_s - t.macro_min_s) / t.macro_step_s + 1e-9));
  // Coarse pass at kCoarse grid steps, then every step around the best coarse point.
  constexpr int kCoarse = 4;
  for (int i = 0; i <= steps; i += kCoarse) {
    visit(i);
  }
  if (std::isfinite(best_gap)) {
    const int centre = static_cast<int>(std::lround((out.params.macro_transit_mean_s - t.macro_min_s) / t.macro_step_s));
    for (int i = std::max(0, centre - kCoarse); i <= std::min(steps, centre + kCoarse); ++i) {
      visit(i);
    }
  }
  for (const auto & [i, g] : seen) {
    out.grid.push_back(g);
  }
  out.within_tolerance = std::isfinite(best_gap) && best_gap <= t.tolerance * target_s;
  if (!std::isfinite(best_gap)) {
    out.params = base_op;
    out.best.cycle_mean_s = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace

bool CalibrationTargets::valid() const
{
  return std::isfinite(expert_cycle_s) && expert_cycle_s >= 0.0 && std::isfinite(novice_cycle_s) &&
         novice_cycle_s >= 0.0 && tolerance > 0.0 && tolerance < 1.0 && trials >= 1 && batches >= 1 &&
         macro_min_s >= 0.0 && macro_max_s >= macro_min_s && macro_step_s > 0.0;
}

CalibrationTargets parse_targets(std::istream & in)
{
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error & e) {
    throw ConfigError(std::string("targets: ") + e.what());
  }
  CalibrationTargets t;
  for (const auto & [name, section] : tree) {
    if (name == "targets") {
      reject_unknown(section, name, {"expert_cycle_s", "novice_cycle_s", "tolerance", "trials", "batches", "seed"});
      read_key(section, name, "expert_cycle_s", t.expert_cycle_s);
      read_key(section, name, "novice_cycle_s", t.novice_cycle_s);
      read_key(section, name, "tolerance", t.tolerance);
      read_key(section, name, "trials", t.trials);
      read_key(section, name, "batches", t.batches);
      read_key(section, name, "seed", t.seed);
    } else if (name == "grid") {
      reject_unknown(section, name, {"macro_min_s", "macro_max_s", "macro_step_s"});
      read_key(section, name, "macro_min_s", t.macro_min_s);
      read_key(section, name, "macro_max_s", t.macro_max_s);
      read_key(section, name, "macro_step_s", t.macro_step_s);
    } else {
      throw ConfigError("targets: unknown section '" + name + "'");
    }
  }
  if (!t.valid()) {
    throw ConfigError("targets: values out of range");
  }
  return t;
}

CalibrationTargets load_targets(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open targets '" + path + "'");
  }
  return parse_targets(in);
}

CalibrationResult calibrate(const CalibrationTargets & targets, const AppConfig & base)
{
  if (!targets.valid()) {
    throw ConfigError("targets: values out of range");
  }
  CalibrationResult r;
  r.targets = targets;
  r.expert = fit(base.expert, targets.expert_cycle_s, targets, base);
  r.novice = fit(base.novice, targets.novice_cycle_s, targets, base);
  r.config = base;
  r.config.expert = r.expert.params;
  r.config.novice = r.novice.params;
  if (!r.expert.within_tolerance || !r.novice.within_tolerance) {
    std::ostringstream msg;
    msg << "no grid point within " << targets.tolerance * 100.0 << "% of the targets; best means: "
        << "expert " << r.expert.best.cycle_mean_s << " s (target " << targets.expert_cycle_s
        << " s), novice " << r.novice.best.cycle_mean_s << " s (target " << targets.novice_cycle_s
        << " s)";
    throw CalibrationError(msg.str(), std::move(r));
  }
  return r;
}

void write_calibration_report(std::ostream & out, const CalibrationResult & r)
{
  write_config(out, r.config);
  out << "\n[calibration]\n"
      << "expert_target_s = " << r.targets.expert_cycle_s << '\n'
      << "expert_mean_s = " << r.expert.best.cycle_mean_s << '\n'
      << "expert_within_tolerance = " << (r.expert.within_tolerance ? "true" : "false") << '\n'
      << "novice_target_s = " << r.targets.novice_cycle_s << '\n'
      << "novice_mean_s = " << r.novice.best.cycle_mean_s << '\n'
      << "novice_within_tolerance = " << (r.novice.within_tolerance ? "true" : "false") << '\n'
      << "tolerance = " << r.targets.tolerance << '\n'
      << "trials = " << r.targets.trials << '\n'
      << "batches = " << r.targets.batches << '\n'
      << "seed = " << r.targets.seed << '\n';
}

}  // namespace ixsim
