#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "avgrl/mdp.hpp"

namespace avgrl {

/// Mixing time, hitting time and distribution-mismatch coefficient of an
/// ergodic MDP.  The true constants maximize over every stationary policy;
/// these are maxima over a finite policy set (all deterministic policies
/// plus optional random stochastic ones), so they are lower estimates.
struct ErgodicParams {
  long t_mix = 0;
  double t_hit = 0.0;
  double rho = 0.0;
  std::size_t policy_set_size = 0;
};

struct ErgodicParamsOptions {
  std::size_t policy_cap = std::size_t{1} << 16;
  long t_cap = 1'000'000;
  int random_policies = 0;
  std::uint64_t random_policy_seed = 0;
};

/// All A^S deterministic policies in lexicographic order of the action
/// tuple (state 0 most significant).
std::vector<StochasticPolicy> enumerate_deterministic_policies(
    int num_states, int num_actions,
    std::size_t cap = std::size_t{1} << 16);

/// Policies whose rows are uniform draws from the action simplex.
std::vector<StochasticPolicy> sample_stochastic_policies(
    int num_states, int num_actions, int count, std::uint64_t seed);

/// min{t >= 1 : max_s ||P^t(s,.) - mu||_1 <= 1/4} by repeated multiplication.
long chain_mixing_time(const Matrix& transition, long t_cap = 1'000'000);

long mixing_time(const Mdp& mdp, std::span<const StochasticPolicy> policies,
                 long t_cap = 1'000'000);

/// max over policies of max_s 1 / mu^pi(s).
double hitting_time(const Mdp& mdp,
                    std::span<const StochasticPolicy> policies);

/// max over policies of sum_s mu*(s) / mu^pi(s), with mu* the stationary
/// distribution of the greedy policy from solve_optimal_average.
double mismatch_coefficient(const Mdp& mdp,
                            std::span<const StochasticPolicy> policies);

double mismatch_coefficient(const Mdp& mdp,
                            std::span<const StochasticPolicy> policies,
                            const Vector& optimal_stationary);

ErgodicParams compute_ergodic_params(const Mdp& mdp,
                                     const ErgodicParamsOptions& options = {});

}  // namespace avgrl
