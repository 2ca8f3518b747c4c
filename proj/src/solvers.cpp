#include "avgrl/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace avgrl {

namespace {

constexpr double kStationaryResidual = 1e-10;

// One Bellman backup r(s,a) + factor * sum_s' p(s'|s,a) v(s') for all pairs.
Matrix backup(const Mdp& mdp, const Vector& values, double factor) {
  Matrix q(mdp.num_states(), mdp.num_actions());
  for (int s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      q(s, a) = mdp.reward(s, a) + factor * mdp.expected_next(s, a, values);
    }
  }
  return q;
}

}  // namespace

double span(const Vector& values) {
  if (values.size() == 0) return 0.0;
  return values.maxCoeff() - values.minCoeff();
}

int argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int best = 0;
  for (Eigen::Index a = 1; a < row.size(); ++a) {
    if (row[a] > row[best]) best = static_cast<int>(a);
  }
  return best;
}

Matrix induced_matrix(const Mdp& mdp, const StochasticPolicy& policy) {
  check_compatible(mdp, policy);
  const int S = mdp.num_states();
  Matrix P = Matrix::Zero(S, S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const double w = policy.prob(s, a);
      if (w == 0.0) continue;
      const auto row = mdp.transition_row(s, a);
      for (int next = 0; next < S; ++next) P(s, next) += w * row[next];
    }
  }
  return P;
}

Vector policy_rewards(const Mdp& mdp, const StochasticPolicy& policy) {
  check_compatible(mdp, policy);
  return policy.probabilities().cwiseProduct(mdp.rewards()).rowwise().sum();
}

Vector stationary_distribution(const Matrix& transition) {
  const Eigen::Index S = transition.rows();
  if (S == 0 || transition.cols() != S) {
    throw ModelError("transition matrix must be square and non-empty");
  }
  const Matrix system = Matrix::Identity(S, S) - transition.transpose() +
                        Matrix::Constant(S, S, 1.0 / static_cast<double>(S));
  Eigen::FullPivLU<Matrix> lu(system);
  lu.setThreshold(1e-11);
  if (lu.rank() < S) {
    throw NonErgodicError(
        "stationary distribution is not unique (chain has several closed "
        "classes)");
  }
  Vector mu = lu.solve(Vector::Constant(S, 1.0 / static_cast<double>(S)));
  // Round-off can leave entries of order -1e-17 on transient states.
  mu = mu.cwiseMax(0.0);
  mu /= mu.sum();
  const double residual =
      (mu.transpose() * transition - mu.transpose()).cwiseAbs().maxCoeff();
  if (!(residual <= kStationaryResidual)) {
    std::ostringstream msg;
    msg << "stationary distribution residual " << residual
        << " exceeds tolerance; chain is ill-conditioned or non-ergodic";
    throw NonErgodicError(msg.str());
  }
  return mu;
}

double average_reward(const Mdp& mdp, const StochasticPolicy& policy) {
  const Vector mu = stationary_distribution(induced_matrix(mdp, policy));
  return mu.dot(policy_rewards(mdp, policy));
}

GainBias solve_gain_bias(const Mdp& mdp, const StochasticPolicy& policy) {
  const int S = mdp.num_states();
  const Matrix P = induced_matrix(mdp, policy);
  const Vector rpi = policy_rewards(mdp, policy);
  GainBias out;
  out.stationary = stationary_distribution(P);

  // Unknowns (v, J):  (I - P) v + J 1 = r^pi,   mu^T v = 0.
  Matrix system = Matrix::Zero(S + 1, S + 1);
  system.topLeftCorner(S, S) = Matrix::Identity(S, S) - P;
  system.topRightCorner(S, 1).setOnes();
  system.bottomLeftCorner(1, S) = out.stationary.transpose();
  Vector rhs = Vector::Zero(S + 1);
  rhs.head(S) = rpi;
  const Vector solution = system.fullPivLu().solve(rhs);

  out.bias = solution.head(S);
  out.gain = solution[S];
  out.qvalues.resize(S, mdp.num_actions());
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      out.qvalues(s, a) =
          mdp.reward(s, a) - out.gain + mdp.expected_next(s, a, out.bias);
    }
  }
  return out;
}

OptimalSolution solve_optimal_average(const Mdp& mdp, double tol,
                                      long max_iterations) {
  if (!(tol > 0.0)) throw Error("solver tolerance must be positive");
  const int S = mdp.num_states();
  Vector values = Vector::Zero(S);
  for (long it = 1; it <= max_iterations; ++it) {
    const Matrix q = backup(mdp, values, 1.0);
    const Vector next = q.rowwise().maxCoeff();
    const Vector diff = next - values;
    const double hi = diff.maxCoeff();
    const double lo = diff.minCoeff();
    if (hi - lo <= tol) {
      OptimalSolution out;
      out.gain = 0.5 * (hi + lo);
      out.bias = values;
      out.qvalues = q.array() - out.gain;
      out.span = span(values);
      out.policy.resize(S);
      double residual = 0.0;
      for (int s = 0; s < S; ++s) {
        out.policy[s] = argmax_lowest(out.qvalues.row(s));
        residual = std::max(
            residual, std::abs(values[s] - out.qvalues(s, out.policy[s])));
      }
      out.residual = residual;
      out.iterations = it;
      return out;
    }
    values = next.array() - next[0];
  }
  throw ConvergenceError(
      "relative value iteration did not converge; the MDP may not be weakly "
      "communicating or its optimal chains may be periodic");
}

DiscountedSolution solve_optimal_discounted(const Mdp& mdp, double gamma,
                                            double tol) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error("discount factor must lie in (0,1)");
  }
  if (!(tol > 0.0)) throw Error("solver tolerance must be positive");
  // ||V_{n+1} - V_n|| <= tol (1-gamma) / gamma^2 puts every reported
  // residual below tol.
  const double stop = tol * (1.0 - gamma) / (gamma * gamma);
  constexpr long cap = 10'000'000;
  const int S = mdp.num_states();
  Vector values = Vector::Zero(S);
  for (long it = 1; it <= cap; ++it) {
    const Vector next = backup(mdp, values, gamma).rowwise().maxCoeff();
    const double change = (next - values).cwiseAbs().maxCoeff();
    values = next;
    if (change <= stop) {
      DiscountedSolution out;
      out.gamma = gamma;
      out.qvalues = backup(mdp, values, gamma);
      out.values = out.qvalues.rowwise().maxCoeff();
      out.iterations = it;
      return out;
    }
  }
  throw ConvergenceError("discounted value iteration did not converge");
}

DiscountGapReport check_discount_gap(const Mdp& mdp, double gamma,
                                     double slack) {
  const OptimalSolution average = solve_optimal_average(mdp, 1e-11);
  const DiscountedSolution discounted =
      solve_optimal_discounted(mdp, gamma, 1e-10);
  DiscountGapReport report;
  report.max_gain_gap =
      (Vector::Constant(mdp.num_states(), average.gain) -
       (1.0 - gamma) * discounted.values)
          .cwiseAbs()
          .maxCoeff();
  report.gain_bound = (1.0 - gamma) * average.span;
  report.discounted_span = span(discounted.values);
  report.span_bound = 2.0 * average.span;
  report.gain_bound_ok = report.max_gain_gap <= report.gain_bound + slack;
  report.span_bound_ok = report.discounted_span <= report.span_bound + slack;
  return report;
}

double reward_difference_residual(const Mdp& mdp,
                                  const StochasticPolicy& pol_a,
                                  const StochasticPolicy& pol_b) {
  const GainBias a = solve_gain_bias(mdp, pol_a);
  const GainBias b = solve_gain_bias(mdp, pol_b);
  const Matrix diff = pol_a.probabilities() - pol_b.probabilities();
  const double predicted =
      a.stationary.dot(diff.cwiseProduct(b.qvalues).rowwise().sum());
  return std::abs(a.gain - b.gain - predicted);
}

}  // namespace avgrl
