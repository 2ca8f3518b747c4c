#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace avgrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model or policy (bad dimensions, probabilities, rewards).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A Markov chain that does not admit the unique stationary distribution
/// or finite mixing behavior an operation requires.
class NonErgodicError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver exhausted its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Finite MDP with known rewards in [0,1] and a dense transition kernel.
///
/// The kernel is stored row-major as [S x A x S], so the distribution over
/// next states for (s, a) is a contiguous span.
class Mdp {
 public:
  /// Validates on construction: rewards in [0,1], every kernel row
  /// non-negative and summing to 1 within 1e-12.
  Mdp(int num_states, int num_actions, Matrix rewards,
      std::vector<double> transitions);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double reward(int s, int a) const { return rewards_(s, a); }
  const Matrix& rewards() const { return rewards_; }

  double transition(int s, int a, int next) const {
    return transitions_[index(s, a) + next];
  }
  std::span<const double> transition_row(int s, int a) const {
    return {transitions_.data() + index(s, a),
            static_cast<std::size_t>(num_states_)};
  }
  const std::vector<double>& transitions() const { return transitions_; }

  /// Expected value of `values` at the next state: sum_s' p(s'|s,a) v(s').
  double expected_next(int s, int a, const Vector& values) const;

 private:
  std::size_t index(int s, int a) const {
    return (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_;
  }

  int num_states_;
  int num_actions_;
  Matrix rewards_;
  std::vector<double> transitions_;
};

/// Per-state action distribution pi(a|s), stored as an [S x A] matrix.
class StochasticPolicy {
 public:
  /// Validates: entries >= 0, every row sums to 1 within 1e-12.
  explicit StochasticPolicy(Matrix probabilities);

  static StochasticPolicy uniform(int num_states, int num_actions);
  static StochasticPolicy deterministic(std::span<const int> actions,
                                        int num_actions);

  int num_states() const { return static_cast<int>(probs_.rows()); }
  int num_actions() const { return static_cast<int>(probs_.cols()); }
  double prob(int s, int a) const { return probs_(s, a); }
  const Matrix& probabilities() const { return probs_; }

 private:
  Matrix probs_;
};

void check_compatible(const Mdp& mdp, const StochasticPolicy& policy);

}  // namespace avgrl
