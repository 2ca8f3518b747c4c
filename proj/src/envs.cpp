#include "avgrl/envs.hpp"

#include <sstream>

namespace avgrl {

namespace {

std::size_t flat(int S, int A, int s, int a) {
  return (static_cast<std::size_t>(s) * A + a) * S;
}

}  // namespace

Mdp make_random_mdp(int num_states, int num_actions, std::uint64_t seed) {
  if (num_states < 1 || num_actions < 1) {
    throw ModelError("random MDP needs S >= 1 and A >= 1");
  }
  Rng rng(seed);
  Matrix rewards(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) rewards(s, a) = rng.uniform();
  }
  std::vector<double> kernel(static_cast<std::size_t>(num_states) *
                             num_actions * num_states);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      const std::size_t base = flat(num_states, num_actions, s, a);
      double total = 0.0;
      for (int next = 0; next < num_states; ++next) {
        kernel[base + next] = rng.exponential();
        total += kernel[base + next];
      }
      for (int next = 0; next < num_states; ++next) {
        kernel[base + next] /= total;
      }
    }
  }
  return Mdp(num_states, num_actions, std::move(rewards), std::move(kernel));
}

Mdp make_river_swim(const RiverSwimParams& params) {
  const int S = params.num_states;
  if (S < 2) throw ModelError("RiverSwim needs at least two states");
  constexpr int A = 2;
  Matrix rewards = Matrix::Zero(S, A);
  rewards(0, kSwimLeft) = params.left_reward;
  rewards(S - 1, kSwimRight) = params.right_reward;

  std::vector<double> kernel(static_cast<std::size_t>(S) * A * S, 0.0);
  for (int s = 0; s < S; ++s) {
    double* left = kernel.data() + flat(S, A, s, kSwimLeft);
    double* right = kernel.data() + flat(S, A, s, kSwimRight);
    left[s > 0 ? s - 1 : 0] = 1.0;
    if (s == 0) {
      right[1] = params.left_bank_forward;
      right[0] = 1.0 - params.left_bank_forward;
    } else if (s == S - 1) {
      right[s] = params.right_bank_stay;
      right[s - 1] = 1.0 - params.right_bank_stay;
    } else {
      right[s + 1] = params.right_forward;
      right[s] = params.right_stay;
      right[s - 1] = params.right_backward;
    }
  }
  return Mdp(S, A, std::move(rewards), std::move(kernel));
}

Mdp make_jump_river_swim(double jump_prob, const RiverSwimParams& params) {
  if (!(jump_prob >= 0.0 && jump_prob <= 1.0)) {
    throw ModelError("jump probability must lie in [0,1]");
  }
  const Mdp base = make_river_swim(params);
  const int S = base.num_states();
  std::vector<double> kernel = base.transitions();
  for (double& p : kernel) {
    p = (1.0 - jump_prob) * p + jump_prob / S;
  }
  return Mdp(S, base.num_actions(), base.rewards(), std::move(kernel));
}

Simulator::Simulator(const Mdp& mdp, Rng rng, int initial_state)
    : mdp_(&mdp), rng_(std::move(rng)), state_(initial_state) {
  if (initial_state < 0 || initial_state >= mdp.num_states()) {
    throw ModelError("initial state out of range");
  }
}

StepResult Simulator::step(int action) {
  if (action < 0 || action >= mdp_->num_actions()) {
    std::ostringstream msg;
    msg << "action " << action << " out of range [0, "
        << mdp_->num_actions() << ")";
    throw ModelError(msg.str());
  }
  const double reward = mdp_->reward(state_, action);
  state_ = sample_index(mdp_->transition_row(state_, action), rng_.uniform());
  ++steps_;
  return {reward, state_};
}

}  // namespace avgrl
