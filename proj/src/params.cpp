#include "avgrl/params.hpp"

#include <algorithm>
#include <sstream>

#include "avgrl/rng.hpp"
#include "avgrl/solvers.hpp"

namespace avgrl {

std::vector<StochasticPolicy> enumerate_deterministic_policies(
    int num_states, int num_actions, std::size_t cap) {
  if (num_states < 1 || num_actions < 1) {
    throw ModelError("policy enumeration needs S >= 1 and A >= 1");
  }
  std::size_t count = 1;
  for (int s = 0; s < num_states; ++s) {
    if (count > cap / static_cast<std::size_t>(num_actions)) {
      std::ostringstream msg;
      msg << "A^S = " << num_actions << "^" << num_states
          << " exceeds the policy enumeration cap " << cap;
      throw Error(msg.str());
    }
    count *= static_cast<std::size_t>(num_actions);
  }
  std::vector<StochasticPolicy> policies;
  policies.reserve(count);
  std::vector<int> actions(num_states, 0);
  for (std::size_t i = 0; i < count; ++i) {
    policies.push_back(StochasticPolicy::deterministic(actions, num_actions));
    // Odometer increment, last state fastest.
    for (int s = num_states - 1; s >= 0; --s) {
      if (++actions[s] < num_actions) break;
      actions[s] = 0;
    }
  }
  return policies;
}

std::vector<StochasticPolicy> sample_stochastic_policies(int num_states,
                                                         int num_actions,
                                                         int count,
                                                         std::uint64_t seed) {
  Rng rng(seed);
  std::vector<StochasticPolicy> policies;
  policies.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    Matrix probs(num_states, num_actions);
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) probs(s, a) = rng.exponential();
      probs.row(s) /= probs.row(s).sum();
    }
    policies.emplace_back(std::move(probs));
  }
  return policies;
}

long chain_mixing_time(const Matrix& transition, long t_cap) {
  if (t_cap < 1) throw Error("t_cap must be at least 1");
  const Vector mu = stationary_distribution(transition);
  const Eigen::RowVectorXd mu_row = mu.transpose();
  Matrix power = transition;
  for (long t = 1; t <= t_cap; ++t) {
    const double distance =
        (power.rowwise() - mu_row).cwiseAbs().rowwise().sum().maxCoeff();
    if (distance <= 0.25) return t;
    power = power * transition;
  }
  throw NonErgodicError(
      "chain did not mix within t_cap steps (periodic or nearly periodic)");
}

long mixing_time(const Mdp& mdp, std::span<const StochasticPolicy> policies,
                 long t_cap) {
  long worst = 0;
  for (const auto& policy : policies) {
    worst = std::max(worst,
                     chain_mixing_time(induced_matrix(mdp, policy), t_cap));
  }
  return worst;
}

double hitting_time(const Mdp& mdp,
                    std::span<const StochasticPolicy> policies) {
  double worst = 0.0;
  for (const auto& policy : policies) {
    const Vector mu = stationary_distribution(induced_matrix(mdp, policy));
    if (mu.minCoeff() <= 0.0) {
      throw NonErgodicError("a policy leaves some state with zero mass");
    }
    worst = std::max(worst, 1.0 / mu.minCoeff());
  }
  return worst;
}

double mismatch_coefficient(const Mdp& mdp,
                            std::span<const StochasticPolicy> policies,
                            const Vector& optimal_stationary) {
  double worst = 0.0;
  for (const auto& policy : policies) {
    const Vector mu = stationary_distribution(induced_matrix(mdp, policy));
    if (mu.minCoeff() <= 0.0) {
      throw NonErgodicError("a policy leaves some state with zero mass");
    }
    worst = std::max(worst, optimal_stationary.cwiseQuotient(mu).sum());
  }
  return worst;
}

double mismatch_coefficient(const Mdp& mdp,
                            std::span<const StochasticPolicy> policies) {
  const OptimalSolution optimal = solve_optimal_average(mdp);
  const auto greedy =
      StochasticPolicy::deterministic(optimal.policy, mdp.num_actions());
  return mismatch_coefficient(
      mdp, policies, stationary_distribution(induced_matrix(mdp, greedy)));
}

ErgodicParams compute_ergodic_params(const Mdp& mdp,
                                     const ErgodicParamsOptions& options) {
  auto policies = enumerate_deterministic_policies(
      mdp.num_states(), mdp.num_actions(), options.policy_cap);
  auto extra = sample_stochastic_policies(
      mdp.num_states(), mdp.num_actions(), options.random_policies,
      options.random_policy_seed);
  policies.insert(policies.end(), std::make_move_iterator(extra.begin()),
                  std::make_move_iterator(extra.end()));

  ErgodicParams out;
  out.policy_set_size = policies.size();
  out.t_mix = mixing_time(mdp, policies, options.t_cap);
  out.t_hit = hitting_time(mdp, policies);
  out.rho = mismatch_coefficient(mdp, policies);
  return out;
}

}  // namespace avgrl
