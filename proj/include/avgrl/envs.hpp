#pragma once

#include <cstdint>

#include "avgrl/mdp.hpp"
#include "avgrl/rng.hpp"

namespace avgrl {

/// RiverSwim chain.  Action 0 swims left (always succeeds, stays put at the
/// left bank); action 1 swims right against the current.  Defaults follow
/// the usual Strehl-Littman constants.
struct RiverSwimParams {
  int num_states = 6;
  double right_forward = 0.35;   // interior state: s -> s+1
  double right_stay = 0.6;       // interior state: s -> s
  double right_backward = 0.05;  // interior state: s -> s-1
  double left_bank_forward = 0.6;  // state 0: 0 -> 1 (else stay)
  double right_bank_stay = 0.6;    // last state: stay (else step back)
  double left_reward = 0.2;        // r(0, left)
  double right_reward = 1.0;       // r(S-1, right)
};

inline constexpr int kSwimLeft = 0;
inline constexpr int kSwimRight = 1;

/// Rewards i.i.d. Uniform[0,1]; each kernel row uniform on the simplex
/// (normalized i.i.d. exponentials).  Deterministic in `seed`.
Mdp make_random_mdp(int num_states, int num_actions, std::uint64_t seed);

Mdp make_river_swim(const RiverSwimParams& params = {});

/// RiverSwim whose kernel is mixed with a uniform jump:
///   p'(.|s,a) = (1 - jump_prob) p(.|s,a) + jump_prob / S.
Mdp make_jump_river_swim(double jump_prob,
                         const RiverSwimParams& params = {});

struct StepResult {
  double reward;
  int next_state;
};

/// Single infinite trajectory through an MDP.  The MDP must outlive the
/// simulator.
class Simulator {
 public:
  Simulator(const Mdp& mdp, Rng rng, int initial_state = 0);

  /// Reward is the table entry r(s,a); the next state is drawn by inverse
  /// CDF over p(.|s,a) with exactly one uniform draw.
  StepResult step(int action);

  int state() const { return state_; }
  long long step_count() const { return steps_; }
  const Mdp& mdp() const { return *mdp_; }

 private:
  const Mdp* mdp_;
  Rng rng_;
  int state_;
  long long steps_ = 0;
};

}  // namespace avgrl
