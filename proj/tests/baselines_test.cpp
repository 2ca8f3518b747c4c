#include <gtest/gtest.h>

#include <cmath>

#include "avgrl/baselines.hpp"
#include "avgrl/envs.hpp"
#include "avgrl/optq.hpp"

namespace avgrl {
namespace {

TEST(EpsGreedy, ConfigValidation) {
  EXPECT_THROW(EpsGreedyQLearner(2, 2, {-0.1, 100.0}), Error);
  EXPECT_THROW(EpsGreedyQLearner(2, 2, {1.1, 100.0}), Error);
  EXPECT_THROW(EpsGreedyQLearner(2, 2, {0.1, 1.0}), Error);
  EXPECT_NO_THROW(EpsGreedyQLearner(2, 2, {0.0, 2.0}));
}

TEST(EpsGreedy, ZeroEpsilonIsGreedy) {
  EpsGreedyQLearner learner(1, 3, {0.0, 10.0});
  learner.update(0, 0, 0.0, 0);  // Q(0,0) drops below H
  Rng rng(1);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(learner.choose_action(0, rng), 1);
}

TEST(EpsGreedy, FullEpsilonIsUniform) {
  EpsGreedyQLearner learner(1, 4, {1.0, 10.0});
  Rng rng(2);
  const int n = 100000;
  std::vector<int> counts(4, 0);
  for (int k = 0; k < n; ++k) ++counts[learner.choose_action(0, rng)];
  const double se = std::sqrt(0.25 * 0.75 / n);
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.25, 3 * se);
}

TEST(EpsGreedy, UpdateHasNoBonusAndBootstrapsFromMaxQ) {
  const double H = 4.0;
  EpsGreedyQLearner learner(2, 2, {0.1, H});
  learner.update(0, 1, 0.5, 1);
  EXPECT_DOUBLE_EQ(learner.q()(0, 1), 0.5 + 0.75 * H);
  learner.update(1, 0, 0.0, 0);
  // max_a Q(0, a) is still H through action 0.
  EXPECT_DOUBLE_EQ(learner.q()(1, 0), 0.75 * H);
  learner.update(0, 1, 1.0, 1);
  const double alpha = learning_rate(H, 2);
  EXPECT_DOUBLE_EQ(learner.q()(0, 1),
                   (1 - alpha) * (0.5 + 0.75 * H) + alpha * (1.0 + 0.75 * H));
}

TEST(EpsGreedy, NoClippingLetsValuesRise) {
  EpsGreedyQLearner learner(1, 1, {0.0, 4.0});
  learner.update(0, 0, 0.0, 0);
  const double low = learner.q()(0, 0);
  learner.update(0, 0, 1.0, 0);
  EXPECT_GT(learner.q()(0, 0), low);
}

TEST(EpsGreedy, SeedReproducibleActions) {
  const Mdp mdp = make_random_mdp(4, 3, 3);
  auto run = [&] {
    EpsGreedyQLearner learner(4, 3, {0.2, 20.0});
    Simulator sim(mdp, Rng(5));
    Rng rng(6);
    std::vector<int> actions;
    for (int t = 0; t < 5000; ++t) {
      const int s = sim.state();
      const int a = learner.choose_action(s, rng);
      const StepResult res = sim.step(a);
      learner.update(s, a, res.reward, res.next_state);
      actions.push_back(a);
    }
    return actions;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace avgrl
