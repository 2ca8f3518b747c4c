#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "avgrl/envs.hpp"
#include "avgrl/harness.hpp"
#include "avgrl/mdp_io.hpp"

namespace avgrl {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("avgrl_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RegretTrace power_trace(double c, double exponent, long long T,
                        long long every) {
  RegretTrace trace;
  for (long long t = every; t <= T; t += every) {
    trace.t.push_back(t);
    trace.cum_regret.push_back(c * std::pow(static_cast<double>(t), exponent));
  }
  return trace;
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.env.name = "jump-river-swim";
  cfg.algorithms = {AlgoSpec::parse_id("optq"), AlgoSpec::parse_id("oomd"),
                    AlgoSpec::parse_id("eps-greedy")};
  cfg.steps = 3000;
  cfg.seeds = {0, 1, 2};
  cfg.master_seed = 7;
  cfg.subsample = 100;
  cfg.output_dir = out;
  cfg.workers = 2;
  return cfg;
}

TEST(Regret, MatchingRewardsGiveZero) {
  const std::vector<double> rewards(50, 0.5);
  const RegretTrace trace = compute_regret(0.5, rewards, 10);
  EXPECT_EQ(trace.t, (std::vector<long long>{10, 20, 30, 40, 50}));
  for (double r : trace.cum_regret) EXPECT_EQ(r, 0.0);
}

TEST(Regret, ZeroRewardsAccumulateTheGain) {
  const std::vector<double> rewards(10, 0.0);
  const RegretTrace trace = compute_regret(1.0, rewards, 3);
  EXPECT_EQ(trace.t, (std::vector<long long>{3, 6, 9, 10}));
  EXPECT_DOUBLE_EQ(trace.cum_regret.back(), 10.0);
}

TEST(Regret, IncrementsBoundedByRewardRange) {
  Rng rng(3);
  std::vector<double> rewards(1000);
  for (double& r : rewards) r = rng.uniform();
  const double J = 0.4;
  const RegretTrace trace = compute_regret(J, rewards, 1);
  for (std::size_t i = 1; i < trace.t.size(); ++i) {
    const double inc = trace.cum_regret[i] - trace.cum_regret[i - 1];
    EXPECT_GE(inc, J - 1.0 - 1e-12);
    EXPECT_LE(inc, J + 1e-12);
  }
}

TEST(Regret, RejectsOutOfRangeReward) {
  const std::vector<double> rewards{0.5, 1.5};
  EXPECT_THROW(compute_regret(0.5, rewards, 1), Error);
  EXPECT_THROW(compute_regret(0.5, std::vector<double>{0.5}, 0), Error);
}

TEST(Slope, ExactPowerLaws) {
  EXPECT_NEAR(fit_loglog_slope(power_trace(3.0, 1.0, 100000, 1000)), 1.0,
              0.01);
  EXPECT_NEAR(fit_loglog_slope(power_trace(3.0, 0.5, 100000, 1000)), 0.5,
              0.01);
  EXPECT_NEAR(fit_loglog_slope(power_trace(3.0, 2.0 / 3.0, 100000, 1000)),
              0.667, 0.01);
}

TEST(Slope, UsesOnlyTheFinalWindow) {
  RegretTrace trace = power_trace(1.0, 1.0, 100000, 1000);
  // Early points (t < 10000) carry a different law.
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (trace.t[i] < 10000) trace.cum_regret[i] = 1.0;
  }
  EXPECT_NEAR(fit_loglog_slope(trace, 0.9), 1.0, 1e-9);
}

TEST(Slope, NeedsTenPositivePoints) {
  RegretTrace trace = power_trace(1.0, 1.0, 100000, 1000);
  for (std::size_t i = 0; i + 9 < trace.t.size(); ++i) {
    trace.cum_regret[i] = -1.0;
  }
  EXPECT_THROW(fit_loglog_slope(trace), Error);
  EXPECT_THROW(fit_loglog_slope(power_trace(1.0, 1.0, 9, 1)), Error);
  EXPECT_NO_THROW(fit_loglog_slope(power_trace(1.0, 1.0, 10, 1), 1.0));
}

TEST(Aggregate, SingleSeedHasZeroStd) {
  RegretTrace t = power_trace(1.0, 0.5, 100, 10);
  const AggregateTrace agg = aggregate_traces(std::vector<RegretTrace>{t});
  EXPECT_EQ(agg.mean, t.cum_regret);
  for (double s : agg.stddev) EXPECT_EQ(s, 0.0);
}

TEST(Aggregate, SampleStandardDeviation) {
  RegretTrace a, b, c;
  a.t = b.t = c.t = {1};
  a.cum_regret = {1.0};
  b.cum_regret = {2.0};
  c.cum_regret = {6.0};
  const AggregateTrace agg = aggregate_traces(std::vector<RegretTrace>{a, b, c});
  EXPECT_DOUBLE_EQ(agg.mean[0], 3.0);
  EXPECT_DOUBLE_EQ(agg.stddev[0], std::sqrt(7.0));
}

TEST(Resolve, TunedDefaultsForBenchmarks) {
  EnvSpec env;
  env.name = "jump-river-swim";
  const Mdp mdp = env.build();
  const ModelSummary model = summarize_model(mdp);
  const auto oomd = resolve_algorithm(AlgoSpec::parse_id("oomd"), env, mdp,
                                      model, 500000);
  const auto& o = std::get<OomdConfig>(oomd.config);
  EXPECT_EQ(o.window, 10);
  EXPECT_EQ(o.episode_length, 30);
  EXPECT_DOUBLE_EQ(o.learning_rate, 0.01);
  EXPECT_EQ(o.num_episodes, 16666);
  const auto eps = resolve_algorithm(AlgoSpec::parse_id("eps-greedy"), env,
                                     mdp, model, 500000);
  EXPECT_DOUBLE_EQ(std::get<EpsGreedyConfig>(eps.config).epsilon, 0.03);
  const auto optq = resolve_algorithm(AlgoSpec::parse_id("optq"), env, mdp,
                                      model, 500000);
  EXPECT_DOUBLE_EQ(std::get<OptQConfig>(optq.config).horizon, 100.0);
  EXPECT_DOUBLE_EQ(std::get<OptQConfig>(optq.config).bonus_coef, 1.0);

  env.name = "random-mdp";
  const Mdp random = env.build();
  const ModelSummary random_model = summarize_model(random);
  const auto ro = resolve_algorithm(AlgoSpec::parse_id("oomd"), env, random,
                                    random_model, 500000);
  EXPECT_EQ(std::get<OomdConfig>(ro.config).window, 2);
  EXPECT_EQ(std::get<OomdConfig>(ro.config).episode_length, 4);
  const auto re = resolve_algorithm(AlgoSpec::parse_id("eps-greedy"), env,
                                    random, random_model, 500000);
  EXPECT_DOUBLE_EQ(std::get<EpsGreedyConfig>(re.config).epsilon, 0.05);
}

TEST(Resolve, SpanBoundModeAndStrictTheory) {
  EnvSpec env;
  const Mdp mdp = env.build();
  const ModelSummary model = summarize_model(mdp);
  OptQSpec q;
  q.span_from_model = true;
  const auto optq = resolve_algorithm({q}, env, mdp, model, 1'000'000);
  const auto& cfg = std::get<OptQConfig>(optq.config);
  EXPECT_DOUBLE_EQ(*cfg.span_bound, model.optimal.span);
  EXPECT_DOUBLE_EQ(cfg.horizon,
                   default_horizon(1'000'000, 6, 2, 0.1, model.optimal.span));
  q.bonus_coef = 1.0;
  EXPECT_THROW(resolve_algorithm({q}, env, mdp, model, 1'000'000), Error);

  OomdSpec strict;
  strict.strict_theory = true;
  // JumpRiverSwim has t_hit = 600, far above T/4 at this T.
  EXPECT_THROW(resolve_algorithm({strict}, env, mdp, model, 1000), Error);
  strict.window = 3;
  EXPECT_THROW(resolve_algorithm({strict}, env, mdp, model, 1'000'000),
               Error);
}

TEST(Resolve, UntunedEnvironmentNeedsExplicitSettings) {
  EnvSpec env;
  env.name = "river-swim";
  const Mdp mdp = env.build();
  ModelSummary model = summarize_model(mdp);
  EXPECT_FALSE(model.ergodic.has_value());
  EXPECT_THROW(resolve_algorithm(AlgoSpec::parse_id("oomd"), env, mdp, model,
                                 1000),
               Error);
  EXPECT_THROW(resolve_algorithm(AlgoSpec::parse_id("eps-greedy"), env, mdp,
                                 model, 1000),
               Error);
  OomdSpec o;
  o.window = 2;
  o.episode_length = 10;
  o.learning_rate = 0.05;
  EXPECT_NO_THROW(resolve_algorithm({o}, env, mdp, model, 1000));
}

TEST(Resolve, UnknownNamesRaise) {
  EXPECT_THROW(AlgoSpec::parse_id("politex"), Error);
  EnvSpec env;
  env.name = "no-such-env";
  EXPECT_THROW(env.build(), Error);
}

TEST(Experiment, WritesCsvAndMetadata) {
  const fs::path out = scratch_dir("write");
  const ExperimentResult res = run_experiment(small_config(out));
  EXPECT_EQ(res.traces.size(), 9u);
  EXPECT_EQ(res.aggregates.size(), 3u);
  const std::string raw = slurp(out / "raw.csv");
  const std::string agg = slurp(out / "aggregate.csv");
  EXPECT_EQ(raw.substr(0, raw.find('\n')), "t,algo,seed,cum_regret");
  EXPECT_EQ(agg.substr(0, agg.find('\n')), "t,algo,regret_mean,regret_std");

  const auto meta = nlohmann::json::parse(slurp(out / "metadata.json"));
  const OptimalSolution exact =
      solve_optimal_average(make_jump_river_swim(0.01), 1e-10);
  EXPECT_EQ(meta["model"]["gain"].get<double>(), exact.gain);
  EXPECT_EQ(meta["model"]["span"].get<double>(), exact.span);
  EXPECT_TRUE(meta["model"].contains("t_mix"));
  EXPECT_TRUE(meta["model"].contains("t_hit"));
  EXPECT_TRUE(meta["model"].contains("rho"));
  EXPECT_FALSE(meta["rng"].get<std::string>().empty());
  EXPECT_FALSE(meta["software"]["version"].get<std::string>().empty());
  EXPECT_EQ(meta["runs"].size(), 9u);
  EXPECT_EQ(meta["config"]["steps"], 3000);
}

TEST(Experiment, AggregateRecomputesFromRawCsv) {
  const fs::path out = scratch_dir("recompute");
  run_experiment(small_config(out));
  const auto raw = read_raw_csv(out / "raw.csv");
  const auto agg = read_aggregate_csv(out / "aggregate.csv");
  ASSERT_EQ(raw.size(), 9u);
  ASSERT_EQ(agg.size(), 3u);
  for (const auto& a : agg) {
    std::vector<RegretTrace> group;
    for (const auto& r : raw) {
      if (r.algo == a.algo) group.push_back(r);
    }
    ASSERT_EQ(group.size(), 3u);
    const AggregateTrace again = aggregate_traces(group);
    EXPECT_EQ(again.t, a.t);
    EXPECT_EQ(again.mean, a.mean);
    EXPECT_EQ(again.stddev, a.stddev);
  }
}

TEST(Experiment, RerunIsBitIdentical) {
  const fs::path a = scratch_dir("rerun_a");
  const fs::path b = scratch_dir("rerun_b");
  ExperimentConfig cfg = small_config(a);
  run_experiment(cfg);
  cfg.output_dir = b;
  cfg.workers = 1;  // worker count must not matter
  run_experiment(cfg);
  for (const char* file : {"raw.csv", "aggregate.csv", "metadata.json"}) {
    EXPECT_EQ(slurp(a / file), slurp(b / file)) << file;
  }
}

TEST(Experiment, RandomMdpFromFileMatchesNamedEnvironment) {
  const fs::path dir = scratch_dir("file_env");
  fs::create_directories(dir);
  EnvSpec named;
  named.name = "random-mdp";
  named.env_seed = 5;
  save_mdp(named.build(), dir / "mdp.json");
  EnvSpec from_file;
  from_file.name = (dir / "mdp.json").string();
  EXPECT_TRUE(from_file.is_file());
  const ModelSummary a = summarize_model(named.build());
  const ModelSummary b = summarize_model(from_file.build());
  EXPECT_EQ(a.optimal.gain, b.optimal.gain);
}

TEST(Experiment, ValidatesConfig) {
  ExperimentConfig cfg = small_config({});
  cfg.env.name = "river-swim";
  OomdSpec o;
  o.window = 2;
  o.episode_length = 10;
  o.learning_rate = 0.05;
  cfg.algorithms = {{o}};
  EXPECT_NO_THROW(run_experiment(cfg));
  cfg.steps = 0;
  EXPECT_THROW(run_experiment(cfg), Error);
  cfg.steps = 10;
  cfg.seeds.clear();
  EXPECT_THROW(run_experiment(cfg), Error);
}

TEST(Experiment, SubsampleRecordsExactPrefixSums) {
  EnvSpec env;
  const Mdp mdp = env.build();
  const ModelSummary model = summarize_model(mdp);
  const ResolvedAlgo algo = resolve_algorithm(AlgoSpec::parse_id("optq"), env,
                                              mdp, model, 1234);
  const RunRecord run = run_single(algo, mdp, 1234, 3, 0);
  const RegretTrace fine = compute_regret(model.optimal.gain, run.rewards, 1);
  const RegretTrace coarse =
      compute_regret(model.optimal.gain, run.rewards, 100);
  EXPECT_EQ(coarse.t.back(), 1234);
  for (std::size_t i = 0; i < coarse.t.size(); ++i) {
    EXPECT_EQ(coarse.cum_regret[i],
              fine.cum_regret[static_cast<std::size_t>(coarse.t[i] - 1)]);
  }
}

}  // namespace
}  // namespace avgrl
