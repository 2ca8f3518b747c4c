#pragma once

#include <optional>
#include <vector>

#include "avgrl/mdp.hpp"

namespace avgrl {

/// Configuration of optimistic Q-learning on the discounted surrogate with
/// gamma = 1 - 1/H.  The bonus is b_tau = bonus_coef * sqrt(H / tau).
struct OptQConfig {
  double horizon = 100.0;  // H
  double delta = 0.1;
  /// Upper bound on spn(v*) when the bonus was derived from it.
  std::optional<double> span_bound;
  double bonus_coef = 1.0;
  /// Run length the bonus was configured for; longer runs are refused.
  long long total_steps = 0;

  /// Bonus coefficient given directly (fixed-constant mode).
  static OptQConfig with_bonus_coef(double horizon, double bonus_coef,
                                    long long total_steps);

  /// Bonus c = 4 span sqrt(ln(2T/delta)).  Without an explicit horizon,
  /// H comes from default_horizon.
  static OptQConfig from_span_bound(double span_bound, long long total_steps,
                                    int num_states, int num_actions,
                                    double delta,
                                    std::optional<double> horizon = {});

  double gamma() const { return 1.0 - 1.0 / horizon; }
  double bonus(long long tau) const;
  void validate() const;
};

/// H = min{ sqrt(span T / (S A)), (T / (S A ln(4T/delta)))^(1/3) },
/// clamped below at 2.
double default_horizon(long long total_steps, int num_states,
                       int num_actions, double delta, double span_bound);

/// alpha_tau = (H + 1) / (H + tau).
inline double learning_rate(double horizon, long long tau) {
  return (horizon + 1.0) / (horizon + static_cast<double>(tau));
}

/// Weights alpha_tau^i = alpha_i prod_{j=i+1}^{tau} (1 - alpha_j) for
/// i = 1..tau (element i-1 of the result).
std::vector<double> alpha_weights(double horizon, long long tau);

/// Optimistic Q-learning learner state: Q, the clipped estimate Qhat, Vhat
/// and visit counts.  All estimates start at H.
class OptimisticQLearner {
 public:
  OptimisticQLearner(int num_states, int num_actions, OptQConfig config);

  /// argmax_a Qhat(s,a), ties to the lowest index.
  int choose_action(int s) const;

  /// n += 1; tau = n(s,a); Q <- (1-alpha) Q + alpha (r + gamma Vhat(s') + b);
  /// Qhat <- min(Qhat, Q); Vhat(s) <- max_a Qhat(s,a).
  void update(int s, int a, double reward, int next_state);

  const Matrix& q() const { return q_; }
  const Matrix& q_hat() const { return q_hat_; }
  const Vector& v_hat() const { return v_hat_; }
  const Eigen::MatrixX<long long>& visits() const { return visits_; }
  long long updates() const { return updates_; }
  const OptQConfig& config() const { return config_; }

 private:
  OptQConfig config_;
  Matrix q_;
  Matrix q_hat_;
  Vector v_hat_;
  Eigen::MatrixX<long long> visits_;
  long long updates_ = 0;
};

}  // namespace avgrl
