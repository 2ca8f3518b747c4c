#pragma once

#include <vector>

#include "avgrl/mdp.hpp"

namespace avgrl {

/// Gain, bias and Q-values of a fixed policy, with the bias pinned by
/// sum_s mu(s) v(s) = 0.
struct GainBias {
  double gain = 0.0;
  Vector bias;
  Matrix qvalues;
  Vector stationary;
};

/// Solution of the average-reward optimality equation
///   J* + q*(s,a) = r(s,a) + sum_s' p(s'|s,a) v*(s'),  v*(s) = max_a q*(s,a).
/// The bias is pinned by v*(0) = 0.
struct OptimalSolution {
  double gain = 0.0;
  Vector bias;
  Matrix qvalues;
  double span = 0.0;
  std::vector<int> policy;
  /// max_s |v*(s) - max_a q*(s,a)| at termination.
  double residual = 0.0;
  long iterations = 0;
};

struct DiscountedSolution {
  double gamma = 0.0;
  Matrix qvalues;
  Vector values;
  long iterations = 0;
};

/// Measured sides of the two discounted/undiscounted comparison bounds:
///   |J* - (1-gamma) V*(s)| <= (1-gamma) spn(v*)   for all s,
///   spn(V*) <= 2 spn(v*).
struct DiscountGapReport {
  bool gain_bound_ok = false;
  bool span_bound_ok = false;
  double max_gain_gap = 0.0;  // max_s |J* - (1-gamma) V*(s)|
  double gain_bound = 0.0;    // (1-gamma) spn(v*)
  double discounted_span = 0.0;
  double span_bound = 0.0;    // 2 spn(v*)
  double gain_slack() const { return gain_bound - max_gain_gap; }
  double span_slack() const { return span_bound - discounted_span; }
};

double span(const Vector& values);

/// Index of the largest entry; ties go to the lowest index.
int argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row);

/// P^pi(s, s') = sum_a pi(a|s) p(s'|s,a).
Matrix induced_matrix(const Mdp& mdp, const StochasticPolicy& policy);

/// r^pi(s) = sum_a pi(a|s) r(s,a).
Vector policy_rewards(const Mdp& mdp, const StochasticPolicy& policy);

/// Unique stationary distribution of a row-stochastic matrix, from
/// (I - P^T + 11^T / S) x = 1 / S.  Throws NonErgodicError when the
/// system is singular (more than one closed class).
Vector stationary_distribution(const Matrix& transition);

double average_reward(const Mdp& mdp, const StochasticPolicy& policy);

GainBias solve_gain_bias(const Mdp& mdp, const StochasticPolicy& policy);

/// Relative value iteration anchored at state 0.  Stops once the span of
/// successive differences is at most `tol`.
OptimalSolution solve_optimal_average(const Mdp& mdp, double tol = 1e-10,
                                      long max_iterations = 1'000'000);

DiscountedSolution solve_optimal_discounted(const Mdp& mdp, double gamma,
                                            double tol = 1e-10);

/// Compares the discounted optimum against the average-reward optimum.
/// `slack` absorbs the solvers' own termination error.
DiscountGapReport check_discount_gap(const Mdp& mdp, double gamma,
                                     double slack = 1e-8);

/// |J^a - J^b - sum_s sum_a mu^a(s) (pi_a(a|s) - pi_b(a|s)) q^b(s,a)|.
/// The performance-difference identity makes this zero up to round-off.
double reward_difference_residual(const Mdp& mdp,
                                  const StochasticPolicy& pol_a,
                                  const StochasticPolicy& pol_b);

}  // namespace avgrl
