#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "avgrl/baselines.hpp"
#include "avgrl/mdp.hpp"
#include "avgrl/oomd.hpp"
#include "avgrl/optq.hpp"
#include "avgrl/params.hpp"
#include "avgrl/solvers.hpp"

namespace avgrl {

/// Environment by name (`random-mdp`, `river-swim`, `jump-river-swim`) or,
/// for any other name, a path to an MDP JSON file.
struct EnvSpec {
  std::string name = "jump-river-swim";
  std::uint64_t env_seed = 0;
  double jump_prob = 0.01;
  int num_states = 6;
  int num_actions = 2;

  Mdp build() const;
  bool is_file() const;
  nlohmann::json to_json() const;
};

struct OptQSpec {
  std::optional<double> horizon;
  double delta = 0.1;
  std::optional<double> bonus_coef;
  std::optional<double> span_bound;
  /// Use spn(v*) of the true MDP as the span bound.
  bool span_from_model = false;
};

struct OomdSpec {
  std::optional<int> window;
  std::optional<long long> episode_length;
  std::optional<double> learning_rate;
  bool strict_theory = false;
};

struct EpsGreedySpec {
  std::optional<double> epsilon;
  double horizon = 100.0;
};

/// Unresolved algorithm choice; ids are `optq`, `oomd`, `eps-greedy`.
struct AlgoSpec {
  std::variant<OptQSpec, OomdSpec, EpsGreedySpec> params;

  std::string id() const;
  static AlgoSpec parse_id(const std::string& id);
};

/// Algorithm with every hyperparameter fixed.
struct ResolvedAlgo {
  std::string id;
  std::variant<OptQConfig, OomdConfig, EpsGreedyConfig> config;
  nlohmann::json to_json() const;
};

/// Exact quantities of the environment used for regret and tuning.
struct ModelSummary {
  OptimalSolution optimal;
  std::optional<ErgodicParams> ergodic;
  std::string ergodic_error;
  nlohmann::json to_json() const;
};

ModelSummary summarize_model(const Mdp& mdp);

/// Fills unset hyperparameters: the tuned experiment settings for the two
/// named benchmark environments, theory formulas under strict mode or when
/// a span bound is requested.
ResolvedAlgo resolve_algorithm(const AlgoSpec& spec, const EnvSpec& env,
                               const Mdp& mdp, const ModelSummary& model,
                               long long total_steps);

struct ExperimentConfig {
  EnvSpec env;
  std::vector<AlgoSpec> algorithms;
  long long steps = 0;
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 0;
  long long subsample = 1000;
  std::filesystem::path output_dir;  // empty: no files written
  unsigned workers = 0;              // 0: hardware concurrency

  void validate() const;
};

/// Cumulative regret sum_{tau <= t} (J* - r_tau) at the recorded steps.
struct RegretTrace {
  std::vector<long long> t;
  std::vector<double> cum_regret;
  std::string algo;
  std::uint64_t seed = 0;
};

struct AggregateTrace {
  std::string algo;
  std::vector<long long> t;
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation (n - 1)
};

struct RunRecord {
  std::string algo;
  std::uint64_t seed = 0;
  std::vector<double> rewards;
  std::optional<OomdRunStats> oomd_stats;
};

struct ExperimentResult {
  std::vector<RegretTrace> traces;
  std::vector<AggregateTrace> aggregates;
  nlohmann::json metadata;

  const AggregateTrace& aggregate(const std::string& algo) const;
};

/// Prefix sums of (J* - r_t), recorded at every multiple of `subsample`
/// and at T.  Steps are 1-based.
RegretTrace compute_regret(double optimal_gain,
                           std::span<const double> rewards,
                           long long subsample);

/// Rewards of one (algorithm, seed) run.  Environment and learner draw
/// from separate substreams of (master seed, algorithm id, seed).
RunRecord run_single(const ResolvedAlgo& algo, const Mdp& mdp,
                     long long steps, std::uint64_t master_seed,
                     std::uint64_t seed);

AggregateTrace aggregate_traces(std::span<const RegretTrace> traces);

/// Runs every (algorithm, seed) pair, aggregates, and writes raw.csv,
/// aggregate.csv and metadata.json when an output directory is set.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Least-squares slope of log(regret) against log(t) over
/// t >= (1 - window) * t_last, using only points with positive regret.
double fit_loglog_slope(const RegretTrace& trace, double window = 0.9);

void write_raw_csv(const std::filesystem::path& path,
                   std::span<const RegretTrace> traces);
void write_aggregate_csv(const std::filesystem::path& path,
                         std::span<const AggregateTrace> aggregates);

std::vector<RegretTrace> read_raw_csv(const std::filesystem::path& path);
std::vector<AggregateTrace> read_aggregate_csv(
    const std::filesystem::path& path);

/// The mean curve of one algorithm from aggregate.csv, as a trace.
RegretTrace read_mean_trace(const std::filesystem::path& aggregate_csv,
                            const std::string& algo);

std::string software_version();

}  // namespace avgrl
