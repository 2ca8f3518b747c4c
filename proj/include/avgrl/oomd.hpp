#pragma once

#include <span>
#include <vector>

#include "avgrl/envs.hpp"
#include "avgrl/mdp.hpp"
#include "avgrl/rng.hpp"

namespace avgrl {

/// Episode and step-size configuration for policy optimization with one
/// optimistic mirror-descent bandit per state.
struct OomdConfig {
  int window = 10;                 // N: estimator interval length minus 1
  long long episode_length = 30;   // B
  double learning_rate = 0.01;     // eta
  long long num_episodes = 0;      // K = floor(T / B); informational
  /// When set, the episode must hold an interval plus its rest period
  /// (B >= 2N + 1) and eta must sit in the stable regime eta <= 1/(270 C).
  bool strict_theory = false;

  /// C = N + 1 bounds sum_a pi(a) beta_hat(a).
  double stability_constant() const { return window + 1.0; }
  double max_stable_learning_rate() const {
    return 1.0 / (270.0 * stability_constant());
  }
  bool in_stable_regime() const {
    return learning_rate <= max_stable_learning_rate();
  }
  void validate() const;
};

/// Theory-driven parameters together with the raw formula values they
/// were rounded from.
struct OomdDerivation {
  OomdConfig config;
  double window_formula = 0.0;   // 4 t_mix log2 T
  double episode_formula = 0.0;  // 16 t_mix t_hit (log2 T)^2
  double learning_rate_terms[3] = {0.0, 0.0, 0.0};
  bool episode_adjusted = false;  // B lowered to divide T
};

/// N = ceil(4 t_mix log2 T), B = largest divisor of T not above
/// 16 t_mix t_hit (log2 T)^2, eta = min{1/(270(N+1)),
/// B sqrt(A) / sqrt(rho T N^3), (BA)^(1/4) / (T N^6)^(1/4)}.
OomdDerivation default_oomd_params(long long total_steps, double t_mix,
                                   double t_hit, double rho, int num_actions);

struct TrajectoryStep {
  int state;
  int action;
  double reward;
};

struct BetaEstimate {
  std::vector<double> beta_hat;
  int interval_count = 0;
};

/// Importance-weighted estimate of the per-action value of `target_state`
/// from one episode.  Scans tau from the first step; each visit to the
/// target with tau <= t2 - N opens an interval of N+1 rewards, contributes
/// R * 1[a_tau = a] / pi(a), and skips tau ahead by 2N.  Returns the mean
/// over intervals, or zeros when there were none.
BetaEstimate estimate_beta(std::span<const TrajectoryStep> trajectory,
                           std::span<const double> policy_row,
                           int target_state, int window);

struct LogBarrierSolution {
  std::vector<double> pi;
  double multiplier = 0.0;  // lambda
  int iterations = 0;
};

/// argmax over the simplex of <pi, gain> - D(pi, reference) for the
/// log-barrier regularizer (1/eta) sum_a log(1/x(a)).  The maximizer is
/// pi(a) = 1 / (eta (lambda - gain(a)) + 1 / reference(a)) with lambda the
/// root of sum_a pi(a) = 1, found by safeguarded Newton on a bracket.
LogBarrierSolution solve_log_barrier(std::span<const double> reference,
                                     std::span<const double> gain,
                                     double eta);

inline std::vector<double> solve_log_barrier_argmax(
    std::span<const double> reference, std::span<const double> gain,
    double eta) {
  return solve_log_barrier(reference, gain, eta).pi;
}

/// max_a |gain(a) + 1/(eta pi(a)) - 1/(eta reference(a)) - lambda|.
double log_barrier_kkt_residual(std::span<const double> reference,
                                std::span<const double> gain, double eta,
                                const LogBarrierSolution& solution);

/// Per-state iterate pair: the played distribution and the auxiliary one
/// carrying the mirror-descent memory.
struct OomdPerState {
  std::vector<double> pi;
  std::vector<double> pi_aux;

  static OomdPerState uniform(int num_actions);
};

/// pi_aux' = argmax{<pi, beta> - D(pi, pi_aux)};
/// pi'     = argmax{<pi, beta> - D(pi, pi_aux')}.
OomdPerState oomd_update(const OomdPerState& state,
                         std::span<const double> beta_hat, double eta);

struct OomdRunStats {
  long long episodes = 0;
  long long remainder_steps = 0;  // steps after K*B played with final policy
  long long empty_estimates = 0;  // (k, s) pairs with no interval
  long long estimator_checks = 0;
  long long estimator_violations = 0;  // sum_a pi beta_hat > N+1
  double max_estimator_mass = 0.0;
  long long stability_checks = 0;
  long long stability_violations = 0;  // |pi' - pi| > 120 eta C pi
  /// Largest observed |pi'(a) - pi(a)| / (eta C pi(a)); the stable-regime
  /// bound is 120.
  double max_stability_ratio = 0.0;
};

/// Learner state for MDP-OOMD: one OomdPerState per state.
class MdpOomdLearner {
 public:
  MdpOomdLearner(int num_states, int num_actions, OomdConfig config);

  int act(int s, Rng& rng) const;
  Matrix policy() const;
  const OomdPerState& state(int s) const { return states_[s]; }
  const OomdConfig& config() const { return config_; }

  /// Feeds one episode's trajectory: estimate then update every state.
  /// Invariant checks are tallied into `stats`.
  void end_episode(std::span<const TrajectoryStep> trajectory,
                   OomdRunStats& stats);

 private:
  OomdConfig config_;
  int num_actions_;
  std::vector<OomdPerState> states_;
};

struct OomdRunOptions {
  bool record_policies = false;
};

struct OomdRunResult {
  std::vector<double> rewards;
  OomdRunStats stats;
  std::vector<Matrix> policies;  // pi_k for k = 1..K+1 when recorded
};

/// Plays K = floor(T/B) episodes, updating after each; leftover steps are
/// played with the final policy and counted in the rewards.
OomdRunResult run_mdp_oomd(Simulator& sim, const OomdConfig& config,
                           long long total_steps, Rng& rng,
                           const OomdRunOptions& options = {});

}  // namespace avgrl
