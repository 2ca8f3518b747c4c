#include "avgrl/optq.hpp"

#include <algorithm>
#include <cmath>

#include "avgrl/solvers.hpp"

namespace avgrl {

OptQConfig OptQConfig::with_bonus_coef(double horizon, double bonus_coef,
                                       long long total_steps) {
  OptQConfig cfg;
  cfg.horizon = horizon;
  cfg.bonus_coef = bonus_coef;
  cfg.total_steps = total_steps;
  cfg.validate();
  return cfg;
}

OptQConfig OptQConfig::from_span_bound(double span_bound,
                                       long long total_steps, int num_states,
                                       int num_actions, double delta,
                                       std::optional<double> horizon) {
  OptQConfig cfg;
  cfg.delta = delta;
  cfg.span_bound = span_bound;
  cfg.total_steps = total_steps;
  cfg.horizon = horizon ? *horizon
                        : default_horizon(total_steps, num_states,
                                          num_actions, delta, span_bound);
  // ln(2T/delta) is fixed by the configured T, not the elapsed time.
  cfg.bonus_coef = 4.0 * span_bound *
                   std::sqrt(std::log(2.0 * static_cast<double>(total_steps) /
                                      delta));
  cfg.validate();
  return cfg;
}

double OptQConfig::bonus(long long tau) const {
  return bonus_coef * std::sqrt(horizon / static_cast<double>(tau));
}

void OptQConfig::validate() const {
  if (!(horizon >= 2.0)) throw Error("optimistic Q-learning needs H >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
  if (!(bonus_coef >= 0.0)) throw Error("bonus coefficient must be >= 0");
  if (span_bound && !(*span_bound >= 0.0)) {
    throw Error("span bound must be >= 0");
  }
  if (total_steps < 1) throw Error("configured horizon T must be positive");
}

double default_horizon(long long total_steps, int num_states,
                       int num_actions, double delta, double span_bound) {
  if (total_steps < 1 || num_states < 1 || num_actions < 1 ||
      !(span_bound > 0.0)) {
    throw Error("default_horizon needs positive T, S, A and span bound");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
  const double T = static_cast<double>(total_steps);
  const double sa = static_cast<double>(num_states) * num_actions;
  const double span_term = std::sqrt(span_bound * T / sa);
  const double cube_term = std::cbrt(T / (sa * std::log(4.0 * T / delta)));
  return std::max(2.0, std::min(span_term, cube_term));
}

std::vector<double> alpha_weights(double horizon, long long tau) {
  if (tau < 1) throw Error("alpha_weights needs tau >= 1");
  std::vector<double> weights(static_cast<std::size_t>(tau));
  double tail = 1.0;  // prod_{j=i+1}^{tau} (1 - alpha_j)
  for (long long i = tau; i >= 1; --i) {
    weights[static_cast<std::size_t>(i - 1)] =
        learning_rate(horizon, i) * tail;
    tail *= 1.0 - learning_rate(horizon, i);
  }
  return weights;
}

OptimisticQLearner::OptimisticQLearner(int num_states, int num_actions,
                                       OptQConfig config)
    : config_(std::move(config)),
      q_(Matrix::Constant(num_states, num_actions, config_.horizon)),
      q_hat_(q_),
      v_hat_(Vector::Constant(num_states, config_.horizon)),
      visits_(Eigen::MatrixX<long long>::Zero(num_states, num_actions)) {
  config_.validate();
}

int OptimisticQLearner::choose_action(int s) const {
  return argmax_lowest(q_hat_.row(s));
}

void OptimisticQLearner::update(int s, int a, double reward, int next_state) {
  if (updates_ >= config_.total_steps) {
    throw Error("run exceeds the horizon T the bonus was configured for");
  }
  const long long tau = ++visits_(s, a);
  const double alpha = learning_rate(config_.horizon, tau);
  q_(s, a) = (1.0 - alpha) * q_(s, a) +
             alpha * (reward + config_.gamma() * v_hat_[next_state] +
                      config_.bonus(tau));
  q_hat_(s, a) = std::min(q_hat_(s, a), q_(s, a));
  v_hat_[s] = q_hat_.row(s).maxCoeff();
  ++updates_;
}

}  // namespace avgrl
