#include "avgrl/baselines.hpp"

#include "avgrl/optq.hpp"
#include "avgrl/solvers.hpp"

namespace avgrl {

void EpsGreedyConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error("epsilon must lie in [0,1]");
  }
  if (!(horizon >= 2.0)) throw Error("epsilon-greedy Q-learning needs H >= 2");
}

EpsGreedyQLearner::EpsGreedyQLearner(int num_states, int num_actions,
                                     EpsGreedyConfig config)
    : config_(config),
      q_(Matrix::Constant(num_states, num_actions, config.horizon)),
      visits_(Eigen::MatrixX<long long>::Zero(num_states, num_actions)) {
  config_.validate();
}

int EpsGreedyQLearner::greedy_action(int s) const {
  return argmax_lowest(q_.row(s));
}

int EpsGreedyQLearner::choose_action(int s, Rng& rng) const {
  if (rng.uniform() < config_.epsilon) {
    return static_cast<int>(rng.below(static_cast<std::uint64_t>(q_.cols())));
  }
  return greedy_action(s);
}

void EpsGreedyQLearner::update(int s, int a, double reward, int next_state) {
  const long long tau = ++visits_(s, a);
  const double alpha = learning_rate(config_.horizon, tau);
  const double gamma = 1.0 - 1.0 / config_.horizon;
  q_(s, a) = (1.0 - alpha) * q_(s, a) +
             alpha * (reward + gamma * q_.row(next_state).maxCoeff());
}

}  // namespace avgrl
