#include "avgrl/oomd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace avgrl {

namespace {

constexpr double kSumTolerance = 1e-13;
constexpr double kDenominatorFloor = 1e-300;
constexpr int kMaxSolverIterations = 200;

double validated_window_eta(int window, double eta) {
  if (window < 1) throw Error("estimator window N must be at least 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error("learning rate must be positive and finite");
  }
  return eta;
}

}  // namespace

void OomdConfig::validate() const {
  validated_window_eta(window, learning_rate);
  if (episode_length < window + 1) {
    throw Error("episode length B must be at least N + 1");
  }
  if (strict_theory) {
    if (episode_length < 2LL * window + 1) {
      throw Error("strict theory mode needs B >= 2N + 1");
    }
    if (!in_stable_regime()) {
      std::ostringstream msg;
      msg << "strict theory mode needs eta <= 1/(270(N+1)) = "
          << max_stable_learning_rate();
      throw Error(msg.str());
    }
  }
}

OomdDerivation default_oomd_params(long long total_steps, double t_mix,
                                   double t_hit, double rho,
                                   int num_actions) {
  const double T = static_cast<double>(total_steps);
  if (total_steps < 2 || !(t_mix >= 1.0) || !(t_hit >= 1.0) ||
      !(rho > 0.0) || num_actions < 1) {
    throw Error("default_oomd_params needs T >= 2, t_mix, t_hit >= 1, "
                "rho > 0, A >= 1");
  }
  if (!(t_mix < T / 4.0 && t_hit < T / 4.0)) {
    throw Error("T too small: need t_mix and t_hit below T/4");
  }
  const double log_t = std::log2(T);
  OomdDerivation out;
  out.window_formula = 4.0 * t_mix * log_t;
  out.episode_formula = 16.0 * t_mix * t_hit * log_t * log_t;

  OomdConfig& cfg = out.config;
  cfg.strict_theory = true;
  cfg.window = static_cast<int>(std::ceil(out.window_formula));
  const long long cap = std::min<long long>(
      total_steps, static_cast<long long>(std::floor(out.episode_formula)));
  long long episode = cap;
  while (episode > 1 && total_steps % episode != 0) --episode;
  out.episode_adjusted = episode != cap;
  cfg.episode_length = episode;
  if (cfg.episode_length < 2LL * cfg.window + 1) {
    std::ostringstream msg;
    msg << "T too small: derived B = " << cfg.episode_length
        << " is below 2N + 1 = " << 2 * cfg.window + 1;
    throw Error(msg.str());
  }
  cfg.num_episodes = total_steps / cfg.episode_length;

  const double N = cfg.window;
  const double B = static_cast<double>(cfg.episode_length);
  const double A = num_actions;
  out.learning_rate_terms[0] = 1.0 / (270.0 * (N + 1.0));
  out.learning_rate_terms[1] = B * std::sqrt(A) / std::sqrt(rho * T * N * N * N);
  out.learning_rate_terms[2] =
      std::pow(B * A, 0.25) / std::pow(T * std::pow(N, 6.0), 0.25);
  cfg.learning_rate = *std::min_element(std::begin(out.learning_rate_terms),
                                        std::end(out.learning_rate_terms));
  cfg.validate();
  return out;
}

BetaEstimate estimate_beta(std::span<const TrajectoryStep> trajectory,
                           std::span<const double> policy_row,
                           int target_state, int window) {
  if (window < 1) throw Error("estimator window N must be at least 1");
  BetaEstimate out;
  out.beta_hat.assign(policy_row.size(), 0.0);
  const long long last = static_cast<long long>(trajectory.size()) - 1;
  long long tau = 0;
  while (tau <= last - window) {
    const TrajectoryStep& start = trajectory[static_cast<std::size_t>(tau)];
    if (start.state != target_state) {
      ++tau;
      continue;
    }
    double total = 0.0;
    for (long long t = tau; t <= tau + window; ++t) {
      total += trajectory[static_cast<std::size_t>(t)].reward;
    }
    const auto a = static_cast<std::size_t>(start.action);
    if (a >= policy_row.size() || !(policy_row[a] > 0.0)) {
      throw Error("estimate_beta: taken action has zero probability under "
                  "the sampling policy");
    }
    out.beta_hat[a] += total / policy_row[a];
    ++out.interval_count;
    tau += 2LL * window;
  }
  if (out.interval_count > 0) {
    for (double& b : out.beta_hat) b /= out.interval_count;
  }
  return out;
}

LogBarrierSolution solve_log_barrier(std::span<const double> reference,
                                     std::span<const double> gain,
                                     double eta) {
  const std::size_t A = reference.size();
  if (A == 0 || gain.size() != A) {
    throw Error("log-barrier solve: reference and gain sizes differ");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error("log-barrier solve: eta must be positive");
  }
  for (std::size_t a = 0; a < A; ++a) {
    if (!(reference[a] > 0.0) || !std::isfinite(reference[a])) {
      throw Error("log-barrier solve: reference is not an interior point");
    }
    if (!std::isfinite(gain[a])) {
      throw Error("log-barrier solve: gain must be finite");
    }
  }

  LogBarrierSolution out;
  // A constant gain is absorbed by the multiplier: the reference is optimal.
  if (std::all_of(gain.begin(), gain.end(),
                  [&](double g) { return g == gain[0]; })) {
    out.pi.assign(reference.begin(), reference.end());
    out.multiplier = gain[0];
    return out;
  }

  // With x = eta * lambda the denominators are x + c(a), where
  // c(a) = 1/reference(a) - eta * gain(a).  sum_a 1/(x + c(a)) is strictly
  // decreasing on x > -min c, running from +inf to 0.
  std::vector<double> c(A);
  for (std::size_t a = 0; a < A; ++a) {
    c[a] = 1.0 / reference[a] - eta * gain[a];
  }
  const double pole = -*std::min_element(c.begin(), c.end());
  auto excess = [&](double x, double* slope) {
    double total = 0.0;
    double derivative = 0.0;
    for (double ca : c) {
      const double inv = 1.0 / (x + ca);
      total += inv;
      derivative -= inv * inv;
    }
    if (slope) *slope = derivative;
    return total - 1.0;
  };

  double lo = pole;
  double step = 1.0;
  double hi = pole + step;
  while (excess(hi, nullptr) >= 0.0) {
    lo = hi;
    step *= 2.0;
    hi = pole + step;
    if (!std::isfinite(hi)) {
      throw Error("log-barrier solve: failed to bracket the multiplier");
    }
  }

  double x = 0.5 * (lo + hi);
  bool converged = false;
  for (int it = 1; it <= kMaxSolverIterations; ++it) {
    out.iterations = it;
    double slope = 0.0;
    const double f = excess(x, &slope);
    if (std::abs(f) <= kSumTolerance) {
      converged = true;
      break;
    }
    if (f > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }

  out.pi.resize(A);
  double total = 0.0;
  for (std::size_t a = 0; a < A; ++a) {
    const double denominator = x + c[a];
    if (!(denominator > kDenominatorFloor)) {
      throw Error("log-barrier solve: denominator underflow");
    }
    out.pi[a] = 1.0 / denominator;
    total += out.pi[a];
  }
  if (!converged && std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "log-barrier solve: simplex sum " << total
        << " after " << out.iterations << " iterations";
    throw ConvergenceError(msg.str());
  }
  out.multiplier = x / eta;
  return out;
}

double log_barrier_kkt_residual(std::span<const double> reference,
                                std::span<const double> gain, double eta,
                                const LogBarrierSolution& solution) {
  double worst = 0.0;
  for (std::size_t a = 0; a < reference.size(); ++a) {
    const double r = gain[a] + 1.0 / (eta * solution.pi[a]) -
                     1.0 / (eta * reference[a]) - solution.multiplier;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

OomdPerState OomdPerState::uniform(int num_actions) {
  if (num_actions < 1) throw Error("need at least one action");
  std::vector<double> u(static_cast<std::size_t>(num_actions),
                        1.0 / num_actions);
  return {u, u};
}

OomdPerState oomd_update(const OomdPerState& state,
                         std::span<const double> beta_hat, double eta) {
  OomdPerState next;
  next.pi_aux = solve_log_barrier(state.pi_aux, beta_hat, eta).pi;
  next.pi = solve_log_barrier(next.pi_aux, beta_hat, eta).pi;
  return next;
}

MdpOomdLearner::MdpOomdLearner(int num_states, int num_actions,
                               OomdConfig config)
    : config_(config),
      num_actions_(num_actions),
      states_(static_cast<std::size_t>(num_states),
              OomdPerState::uniform(num_actions)) {
  config_.validate();
}

int MdpOomdLearner::act(int s, Rng& rng) const {
  return sample_index(states_[static_cast<std::size_t>(s)].pi, rng.uniform());
}

Matrix MdpOomdLearner::policy() const {
  Matrix out(static_cast<Eigen::Index>(states_.size()), num_actions_);
  for (std::size_t s = 0; s < states_.size(); ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      out(static_cast<Eigen::Index>(s), a) = states_[s].pi[a];
    }
  }
  return out;
}

void MdpOomdLearner::end_episode(std::span<const TrajectoryStep> trajectory,
                                 OomdRunStats& stats) {
  const double eta = config_.learning_rate;
  const double bound = config_.stability_constant();
  for (std::size_t s = 0; s < states_.size(); ++s) {
    OomdPerState& current = states_[s];
    const BetaEstimate estimate = estimate_beta(
        trajectory, current.pi, static_cast<int>(s), config_.window);
    if (estimate.interval_count == 0) ++stats.empty_estimates;

    double mass = 0.0;
    for (int a = 0; a < num_actions_; ++a) {
      mass += current.pi[a] * estimate.beta_hat[a];
    }
    ++stats.estimator_checks;
    stats.max_estimator_mass = std::max(stats.max_estimator_mass, mass);
    if (mass > bound * (1.0 + 1e-12)) ++stats.estimator_violations;

    OomdPerState next = oomd_update(current, estimate.beta_hat, eta);

    if (config_.in_stable_regime()) {
      ++stats.stability_checks;
      bool violated = false;
      for (int a = 0; a < num_actions_; ++a) {
        const double ratio = std::abs(next.pi[a] - current.pi[a]) /
                             (eta * bound * current.pi[a]);
        stats.max_stability_ratio = std::max(stats.max_stability_ratio, ratio);
        if (ratio > 120.0) violated = true;
      }
      if (violated) ++stats.stability_violations;
    }
    current = std::move(next);
  }
  ++stats.episodes;
}

OomdRunResult run_mdp_oomd(Simulator& sim, const OomdConfig& config,
                           long long total_steps, Rng& rng,
                           const OomdRunOptions& options) {
  config.validate();
  if (total_steps < 0) throw Error("total steps must be non-negative");
  const Mdp& mdp = sim.mdp();
  MdpOomdLearner learner(mdp.num_states(), mdp.num_actions(), config);

  OomdRunResult out;
  out.rewards.reserve(static_cast<std::size_t>(total_steps));
  const long long episodes = total_steps / config.episode_length;
  std::vector<TrajectoryStep> trajectory;
  trajectory.reserve(static_cast<std::size_t>(config.episode_length));
  if (options.record_policies) out.policies.push_back(learner.policy());

  for (long long k = 0; k < episodes; ++k) {
    trajectory.clear();
    for (long long t = 0; t < config.episode_length; ++t) {
      const int s = sim.state();
      const int a = learner.act(s, rng);
      const StepResult result = sim.step(a);
      trajectory.push_back({s, a, result.reward});
      out.rewards.push_back(result.reward);
    }
    learner.end_episode(trajectory, out.stats);
    if (options.record_policies) out.policies.push_back(learner.policy());
  }
  for (long long t = episodes * config.episode_length; t < total_steps; ++t) {
    const int a = learner.act(sim.state(), rng);
    out.rewards.push_back(sim.step(a).reward);
    ++out.stats.remainder_steps;
  }
  return out;
}

}  // namespace avgrl
