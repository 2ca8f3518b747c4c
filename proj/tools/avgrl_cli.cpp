#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <numeric>
#include <string>

#include "avgrl/harness.hpp"

namespace {

struct RunOptions {
  avgrl::EnvSpec env;
  std::string algo;
  avgrl::OptQSpec optq;
  std::string span_bound;
  avgrl::OomdSpec oomd;
  avgrl::EpsGreedySpec eps;
  long long steps = 0;
  int seeds = 1;
  std::uint64_t master_seed = 0;
  long long subsample = 1000;
  unsigned workers = 0;
  std::string out;
};

void add_env_options(CLI::App* cmd, avgrl::EnvSpec& env) {
  cmd->add_option("--env", env.name,
                  "random-mdp, river-swim, jump-river-swim or an MDP JSON file")
      ->required();
  cmd->add_option("--env-seed", env.env_seed, "seed of random-mdp");
  cmd->add_option("--jump-prob", env.jump_prob,
                  "uniform jump probability of jump-river-swim");
  cmd->add_option("--states", env.num_states, "states of random-mdp");
  cmd->add_option("--actions", env.num_actions, "actions of random-mdp");
}

avgrl::AlgoSpec build_algo(const RunOptions& opts) {
  avgrl::AlgoSpec spec = avgrl::AlgoSpec::parse_id(opts.algo);
  if (auto* q = std::get_if<avgrl::OptQSpec>(&spec.params)) {
    *q = opts.optq;
    if (opts.span_bound == "model") {
      q->span_from_model = true;
    } else if (!opts.span_bound.empty()) {
      std::size_t used = 0;
      q->span_bound = std::stod(opts.span_bound, &used);
      if (used != opts.span_bound.size()) {
        throw avgrl::Error("--span-bound expects a number or 'model'");
      }
    }
  } else if (auto* o = std::get_if<avgrl::OomdSpec>(&spec.params)) {
    *o = opts.oomd;
  } else {
    auto& e = std::get<avgrl::EpsGreedySpec>(spec.params);
    e = opts.eps;
    if (opts.optq.horizon) e.horizon = *opts.optq.horizon;
  }
  return spec;
}

int run_command(const RunOptions& opts) {
  avgrl::ExperimentConfig cfg;
  cfg.env = opts.env;
  cfg.algorithms.push_back(build_algo(opts));
  cfg.steps = opts.steps;
  cfg.seeds.resize(static_cast<std::size_t>(std::max(opts.seeds, 0)));
  std::iota(cfg.seeds.begin(), cfg.seeds.end(), std::uint64_t{0});
  cfg.master_seed = opts.master_seed;
  cfg.subsample = opts.subsample;
  cfg.workers = opts.workers;
  cfg.output_dir = opts.out;
  const auto result = avgrl::run_experiment(cfg);
  const auto& agg = result.aggregates.front();
  std::printf("%s: final mean regret %.6g (std %.6g) at t = %lld\n",
              agg.algo.c_str(), agg.mean.back(), agg.stddev.back(),
              agg.t.back());
  return 0;
}

int solve_command(const avgrl::EnvSpec& env) {
  const avgrl::Mdp mdp = env.build();
  const avgrl::ModelSummary model = avgrl::summarize_model(mdp);
  nlohmann::json out{{"environment", env.to_json()},
                     {"num_states", mdp.num_states()},
                     {"num_actions", mdp.num_actions()},
                     {"model", model.to_json()},
                     {"software",
                      {{"name", "avgrl"},
                       {"version", avgrl::software_version()}}}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int slope_command(const std::string& path, const std::string& algo,
                  double window) {
  const double slope =
      avgrl::fit_loglog_slope(avgrl::read_mean_trace(path, algo), window);
  std::printf("%.6f\n", slope);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular average-reward reinforcement learning experiments"};
  app.set_version_flag("--version", avgrl::software_version());
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "run seeds of one algorithm");
  add_env_options(run_cmd, run.env);
  run_cmd->add_option("--algo", run.algo, "optq, oomd or eps-greedy")
      ->required();
  run_cmd->add_option("--H", run.optq.horizon, "optq / eps-greedy horizon");
  run_cmd->add_option("--delta", run.optq.delta, "optq confidence");
  auto* bonus = run_cmd->add_option("--bonus-coef", run.optq.bonus_coef,
                                    "optq bonus coefficient c");
  run_cmd->add_option("--span-bound", run.span_bound,
                      "optq span bound, or 'model' for spn(v*)")
      ->excludes(bonus);
  run_cmd->add_option("--N", run.oomd.window, "oomd estimator window");
  run_cmd->add_option("--B", run.oomd.episode_length, "oomd episode length");
  run_cmd->add_option("--eta", run.oomd.learning_rate, "oomd learning rate");
  run_cmd->add_flag("--strict-theory", run.oomd.strict_theory,
                    "oomd: derive N, B, eta from the ergodic parameters");
  run_cmd->add_option("--epsilon", run.eps.epsilon, "eps-greedy exploration");
  run_cmd->add_option("--steps", run.steps, "horizon T")->required();
  run_cmd->add_option("--seeds", run.seeds, "number of seeds (0..n-1)");
  run_cmd->add_option("--master-seed", run.master_seed, "master seed");
  run_cmd->add_option("--subsample", run.subsample, "record every k-th step");
  run_cmd->add_option("--workers", run.workers, "parallel runs (0: all cores)");
  run_cmd->add_option("--out", run.out, "output directory")->required();

  avgrl::EnvSpec solve_env;
  auto* solve_cmd = app.add_subcommand("solve", "print exact model quantities");
  add_env_options(solve_cmd, solve_env);

  std::string slope_in;
  std::string slope_algo;
  double slope_window = 0.9;
  auto* slope_cmd =
      app.add_subcommand("slope", "fit the log-log regret slope");
  slope_cmd->add_option("--in", slope_in, "aggregate.csv")->required();
  slope_cmd->add_option("--algo", slope_algo, "algorithm id")->required();
  slope_cmd->add_option("--window", slope_window, "final fraction of t");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) return run_command(run);
    if (*solve_cmd) return solve_command(solve_env);
    return slope_command(slope_in, slope_algo, slope_window);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "avgrl: error: %s\n", e.what());
    return 1;
  }
}
