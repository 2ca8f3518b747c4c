#include "avgrl/mdp.hpp"

#include <cmath>
#include <sstream>

namespace avgrl {

namespace {

constexpr double kSimplexTolerance = 1e-12;

}  // namespace

Mdp::Mdp(int num_states, int num_actions, Matrix rewards,
         std::vector<double> transitions)
    : num_states_(num_states),
      num_actions_(num_actions),
      rewards_(std::move(rewards)),
      transitions_(std::move(transitions)) {
  if (num_states_ < 1 || num_actions_ < 1) {
    throw ModelError("MDP needs at least one state and one action");
  }
  if (rewards_.rows() != num_states_ || rewards_.cols() != num_actions_) {
    throw ModelError("reward table must be [S x A]");
  }
  const auto expected = static_cast<std::size_t>(num_states_) * num_actions_ *
                        num_states_;
  if (transitions_.size() != expected) {
    throw ModelError("transition table must be [S x A x S]");
  }
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      const double r = rewards_(s, a);
      if (!(r >= 0.0 && r <= 1.0)) {
        std::ostringstream msg;
        msg << "reward r(" << s << "," << a << ") = " << r
            << " outside [0,1]";
        throw ModelError(msg.str());
      }
      double total = 0.0;
      for (double p : transition_row(s, a)) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          std::ostringstream msg;
          msg << "negative or non-finite transition probability at (" << s
              << "," << a << ")";
          throw ModelError(msg.str());
        }
        total += p;
      }
      if (std::abs(total - 1.0) > kSimplexTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "transition row (" << s << "," << a << ") sums to " << total;
        throw ModelError(msg.str());
      }
    }
  }
}

double Mdp::expected_next(int s, int a, const Vector& values) const {
  const auto row = transition_row(s, a);
  double total = 0.0;
  for (int next = 0; next < num_states_; ++next) {
    total += row[next] * values[next];
  }
  return total;
}

StochasticPolicy::StochasticPolicy(Matrix probabilities)
    : probs_(std::move(probabilities)) {
  if (probs_.rows() < 1 || probs_.cols() < 1) {
    throw ModelError("policy needs at least one state and one action");
  }
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    double total = 0.0;
    for (Eigen::Index a = 0; a < probs_.cols(); ++a) {
      const double p = probs_(s, a);
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ModelError("policy probabilities must be finite and >= 0");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "policy row " << s << " sums to " << total;
      throw ModelError(msg.str());
    }
  }
}

StochasticPolicy StochasticPolicy::uniform(int num_states, int num_actions) {
  if (num_states < 1 || num_actions < 1) {
    throw ModelError("policy needs at least one state and one action");
  }
  return StochasticPolicy(
      Matrix::Constant(num_states, num_actions, 1.0 / num_actions));
}

StochasticPolicy StochasticPolicy::deterministic(std::span<const int> actions,
                                                 int num_actions) {
  Matrix probs = Matrix::Zero(static_cast<Eigen::Index>(actions.size()),
                              num_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= num_actions) {
      throw ModelError("deterministic policy action out of range");
    }
    probs(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
  }
  return StochasticPolicy(std::move(probs));
}

void check_compatible(const Mdp& mdp, const StochasticPolicy& policy) {
  if (policy.num_states() != mdp.num_states() ||
      policy.num_actions() != mdp.num_actions()) {
    throw ModelError("policy dimensions do not match the MDP");
  }
}

}  // namespace avgrl
