#pragma once

#include "avgrl/mdp.hpp"
#include "avgrl/rng.hpp"

namespace avgrl {

struct EpsGreedyConfig {
  double epsilon = 0.05;
  double horizon = 100.0;  // gamma = 1 - 1/H
  void validate() const;
};

/// Q-learning with epsilon-greedy exploration on the same discounted
/// surrogate as OptimisticQLearner: alpha_tau = (H+1)/(H+tau), no bonus, no
/// clipping.  Q starts at H.
class EpsGreedyQLearner {
 public:
  EpsGreedyQLearner(int num_states, int num_actions, EpsGreedyConfig config);

  /// With probability epsilon a uniform action, else the greedy one.
  /// Consumes one uniform draw, plus one integer draw when exploring.
  int choose_action(int s, Rng& rng) const;
  int greedy_action(int s) const;

  void update(int s, int a, double reward, int next_state);

  const Matrix& q() const { return q_; }
  const EpsGreedyConfig& config() const { return config_; }

 private:
  EpsGreedyConfig config_;
  Matrix q_;
  Eigen::MatrixX<long long> visits_;
};

}  // namespace avgrl
