#pragma once

#include <cstdint>
#include <string>

#include "ixsim/messages.hpp"
#include "ixsim/rng.hpp"

namespace ixsim
{

/// Scripted operator model.
///
/// Local phases (fine alignment and the hesitation around feeding, locking
/// and withdrawing) improve with practice as a power law in the trial index k.
/// Macro transit, the long move from the working pose to the repository, is
/// drawn from a stationary truncated Gaussian and never improves.
struct OperatorParams
{
  std::string label = "novice";

  double align_noise_mm0 = 3.0;    ///< lateral perception noise std at k = 1
  double align_noise_deg0 = 4.0;   ///< tilt perception noise std at k = 1
  double learn_alpha = 0.6;        ///< power-law exponent for local phases
  double macro_transit_mean_s = 90.0;  ///< calibrated to the 98 s novice cycle
  double macro_transit_std_s = 18.0;
  double feed_speed = 2.0;         ///< mm/tick during axial feed and withdrawal
  std::uint64_t seed = 0;          ///< mixed into every trial seed

  double reaction_s = 2.5;         ///< observe/decide pause after each local action at k = 1
  double reaction_floor_s = 0.5;   ///< practice never shortens the pause below this
  double accept_mm = 3.0;          ///< perceived lateral error the operator accepts
  double accept_deg = 4.0;         ///< perceived tilt error the operator accepts
  double landing_err_mm = 10.0;    ///< lateral scatter at the end of a transit
  double landing_err_deg = 8.0;    ///< tilt scatter at the end of a transit
  double local_speed = 0.5;        ///< mm/tick (and deg/tick) for corrections and short moves
  double standoff_mm = 10.0;       ///< distance in front of the bay mouth where alignment happens
  double forced_feed_prob0 = 0.25; ///< chance at k = 1 of feeding without fine alignment
  double forced_feed_speed = 5.0;  ///< mm/tick of such a forced feed

  bool valid() const;
  friend bool operator==(const OperatorParams &, const OperatorParams &) = default;
};

OperatorParams expert_defaults();
OperatorParams novice_defaults();

/// Lateral perception noise std at trial k (1-based).
double noise_mm_at(const OperatorParams & p, int k);
/// Tilt perception noise std at trial k.
double noise_deg_at(const OperatorParams & p, int k);
/// Local-phase pause at trial k, floored at reaction_floor_s.
double reaction_at(const OperatorParams & p, int k);
/// Forced-feed probability at trial k.
double forced_feed_prob_at(const OperatorParams & p, int k);

enum class Subgoal { Start, Transit, Dwell, Perceive, Correct, Feed, Withdraw, Done };

const char * to_string(Subgoal g);

struct PolicyState
{
  int k = 1;
  Subgoal subgoal = Subgoal::Start;
  Rng rng{0};
  int target_bay = -1;
  int half = 0;               ///< 0 for the first leg of a trial, 1 after a cycle's detach
  std::uint64_t seq = 0;
  // Motion plan of the current transit or correction.
  Pose from;
  Pose goal;
  int plan_ticks = 0;
  int plan_elapsed = 0;
  int dwell_left = 0;
  Subgoal after_dwell = Subgoal::Perceive;
  bool aligning_tilt = true;  ///< tilt is squared up first, then the lateral offset
  bool first_perceive = true;
  bool forced = false;
  double withdrawn_mm = 0.0;
  std::int64_t macro_ticks = 0;
  double macro_planned_s = 0.0;
};

/// Operator policy driven by the state stream.
class OperatorPolicy
{
public:
  explicit OperatorPolicy(OperatorParams params, double dt_s = 0.01);

  /// Prepares trial k (1-based) with its own seed.
  void begin_trial(int k, std::uint64_t trial_seed);

  /// Next command towards the current subgoal given the latest feedback.
  PoseCommand next_command(const StateUpdate & observed);

  const PolicyState & state() const { return state_; }
  const OperatorParams & params() const { return params_; }
  /// Ticks spent in the macro transit of the current trial.
  std::int64_t macro_transit_ticks() const { return state_.macro_ticks; }

private:
  bool follow_plan(const StateUpdate & obs, PoseCommand & out);
  void start_leg(const StateUpdate & obs);
  void perceive(const StateUpdate & obs);
  void plan_move(const Pose & from, const Pose & goal, int min_ticks);
  void dwell(double seconds, Subgoal then);
  PoseCommand make(const Pose & delta, double axial_feed);

  OperatorParams params_;
  double dt_s_;
  PolicyState state_;
};

}  // namespace ixsim
