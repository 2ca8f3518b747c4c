#include "avgrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "avgrl/envs.hpp"
#include "avgrl/mdp_io.hpp"
#include "avgrl/rng.hpp"

#ifndef AVGRL_VERSION
#define AVGRL_VERSION "unknown"
#endif

namespace avgrl {

using nlohmann::json;

namespace {

constexpr char kRandomMdp[] = "random-mdp";
constexpr char kRiverSwim[] = "river-swim";
constexpr char kJumpRiverSwim[] = "jump-river-swim";

// Environment/learner substream selectors.
constexpr std::uint64_t kEnvStream = 0;
constexpr std::uint64_t kAgentStream = 1;

// Hyperparameters tuned for the two benchmark environments.
struct TunedSettings {
  int window;
  long long episode_length;
  double learning_rate;
  double epsilon;
};

std::optional<TunedSettings> tuned_settings(const EnvSpec& env) {
  if (env.name == kRandomMdp) return TunedSettings{2, 4, 0.01, 0.05};
  if (env.name == kJumpRiverSwim) return TunedSettings{10, 30, 0.01, 0.03};
  return std::nullopt;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

std::ifstream open_csv(const std::filesystem::path& path,
                       const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != expected_header) {
    throw Error(path.string() + ": unexpected header '" + header + "'");
  }
  return in;
}

json stats_to_json(const OomdRunStats& s) {
  return json{{"episodes", s.episodes},
              {"remainder_steps", s.remainder_steps},
              {"empty_estimates", s.empty_estimates},
              {"estimator_checks", s.estimator_checks},
              {"estimator_violations", s.estimator_violations},
              {"max_estimator_mass", s.max_estimator_mass},
              {"stability_checks", s.stability_checks},
              {"stability_violations", s.stability_violations},
              {"max_stability_ratio", s.max_stability_ratio}};
}

}  // namespace

std::string software_version() { return AVGRL_VERSION; }

// -- Environments -------------------------------------------------------------

bool EnvSpec::is_file() const {
  return name != kRandomMdp && name != kRiverSwim && name != kJumpRiverSwim;
}

Mdp EnvSpec::build() const {
  if (name == kRandomMdp) {
    return make_random_mdp(num_states, num_actions, env_seed);
  }
  if (name == kRiverSwim) return make_river_swim();
  if (name == kJumpRiverSwim) return make_jump_river_swim(jump_prob);
  if (!std::filesystem::exists(name)) {
    throw Error("unknown environment '" + name +
                "' (expected random-mdp, river-swim, jump-river-swim or an "
                "MDP JSON file)");
  }
  return load_mdp(name);
}

json EnvSpec::to_json() const {
  json out{{"name", name}};
  if (name == kRandomMdp) {
    out["env_seed"] = env_seed;
    out["num_states"] = num_states;
    out["num_actions"] = num_actions;
  } else if (name == kJumpRiverSwim) {
    out["jump_prob"] = jump_prob;
  }
  return out;
}

// -- Algorithms ---------------------------------------------------------------

std::string AlgoSpec::id() const {
  switch (params.index()) {
    case 0: return "optq";
    case 1: return "oomd";
    default: return "eps-greedy";
  }
}

AlgoSpec AlgoSpec::parse_id(const std::string& id) {
  if (id == "optq") return {OptQSpec{}};
  if (id == "oomd") return {OomdSpec{}};
  if (id == "eps-greedy") return {EpsGreedySpec{}};
  throw Error("unknown algorithm '" + id +
              "' (expected optq, oomd or eps-greedy)");
}

json ResolvedAlgo::to_json() const {
  json out{{"algo", id}};
  if (const auto* q = std::get_if<OptQConfig>(&config)) {
    out["H"] = q->horizon;
    out["gamma"] = q->gamma();
    out["bonus_coef"] = q->bonus_coef;
    out["delta"] = q->delta;
    out["span_bound"] = q->span_bound ? json(*q->span_bound) : json(nullptr);
    out["T"] = q->total_steps;
  } else if (const auto* o = std::get_if<OomdConfig>(&config)) {
    out["N"] = o->window;
    out["B"] = o->episode_length;
    out["eta"] = o->learning_rate;
    out["K"] = o->num_episodes;
    out["strict_theory"] = o->strict_theory;
    out["stable_regime"] = o->in_stable_regime();
  } else {
    const auto& e = std::get<EpsGreedyConfig>(config);
    out["epsilon"] = e.epsilon;
    out["H"] = e.horizon;
  }
  return out;
}

json ModelSummary::to_json() const {
  json out;
  out["gain"] = optimal.gain;
  out["span"] = optimal.span;
  out["bias"] = std::vector<double>(optimal.bias.data(),
                                    optimal.bias.data() + optimal.bias.size());
  out["policy"] = optimal.policy;
  out["residual"] = optimal.residual;
  out["iterations"] = optimal.iterations;
  if (ergodic) {
    out["t_mix"] = ergodic->t_mix;
    out["t_hit"] = ergodic->t_hit;
    out["rho"] = ergodic->rho;
    out["policy_set_size"] = ergodic->policy_set_size;
  } else {
    out["t_mix"] = nullptr;
    out["t_hit"] = nullptr;
    out["rho"] = nullptr;
    out["ergodic_error"] = ergodic_error;
  }
  return out;
}

ModelSummary summarize_model(const Mdp& mdp) {
  ModelSummary out;
  out.optimal = solve_optimal_average(mdp, 1e-10);
  try {
    out.ergodic = compute_ergodic_params(mdp);
  } catch (const Error& e) {
    out.ergodic_error = e.what();
  }
  return out;
}

ResolvedAlgo resolve_algorithm(const AlgoSpec& spec, const EnvSpec& env,
                               const Mdp& mdp, const ModelSummary& model,
                               long long total_steps) {
  ResolvedAlgo out;
  out.id = spec.id();
  const auto tuned = tuned_settings(env);

  if (const auto* q = std::get_if<OptQSpec>(&spec.params)) {
    const bool span_mode = q->span_bound.has_value() || q->span_from_model;
    if (span_mode && q->bonus_coef) {
      throw Error("optq: --bonus-coef and --span-bound are mutually exclusive");
    }
    if (span_mode) {
      const double span_bound =
          q->span_bound ? *q->span_bound : model.optimal.span;
      out.config = OptQConfig::from_span_bound(
          span_bound, total_steps, mdp.num_states(), mdp.num_actions(),
          q->delta, q->horizon);
    } else {
      OptQConfig cfg = OptQConfig::with_bonus_coef(
          q->horizon.value_or(100.0), q->bonus_coef.value_or(1.0),
          total_steps);
      cfg.delta = q->delta;
      cfg.validate();
      out.config = cfg;
    }
    return out;
  }

  if (const auto* o = std::get_if<OomdSpec>(&spec.params)) {
    OomdConfig cfg;
    if (o->strict_theory) {
      if (o->window || o->episode_length || o->learning_rate) {
        throw Error("oomd: strict theory mode derives N, B and eta; do not "
                    "override them");
      }
      if (!model.ergodic) {
        throw Error("oomd: strict theory mode needs an ergodic MDP (" +
                    model.ergodic_error + ")");
      }
      cfg = default_oomd_params(total_steps,
                                static_cast<double>(model.ergodic->t_mix),
                                model.ergodic->t_hit, model.ergodic->rho,
                                mdp.num_actions())
                .config;
    } else {
      if (!tuned && !(o->window && o->episode_length && o->learning_rate)) {
        throw Error("oomd: environment '" + env.name +
                    "' has no tuned defaults; pass --N, --B and --eta or "
                    "--strict-theory");
      }
      cfg.window = o->window.value_or(tuned ? tuned->window : 0);
      cfg.episode_length =
          o->episode_length.value_or(tuned ? tuned->episode_length : 0);
      cfg.learning_rate =
          o->learning_rate.value_or(tuned ? tuned->learning_rate : 0.0);
      cfg.num_episodes = total_steps / std::max(1LL, cfg.episode_length);
      cfg.validate();
    }
    out.config = cfg;
    return out;
  }

  const auto& e = std::get<EpsGreedySpec>(spec.params);
  if (!e.epsilon && !tuned) {
    throw Error("eps-greedy: environment '" + env.name +
                "' has no tuned epsilon; pass --epsilon");
  }
  EpsGreedyConfig cfg{e.epsilon.value_or(tuned ? tuned->epsilon : 0.0),
                      e.horizon};
  cfg.validate();
  out.config = cfg;
  return out;
}

// -- Runs ---------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (steps < 1) throw Error("experiment needs T >= 1");
  if (seeds.empty()) throw Error("experiment needs at least one seed");
  if (subsample < 1) throw Error("subsample must be at least 1");
  if (algorithms.empty()) throw Error("experiment needs an algorithm");
}

const AggregateTrace& ExperimentResult::aggregate(
    const std::string& algo) const {
  for (const auto& a : aggregates) {
    if (a.algo == algo) return a;
  }
  throw Error("no aggregate for algorithm " + algo);
}

RegretTrace compute_regret(double optimal_gain,
                           std::span<const double> rewards,
                           long long subsample) {
  if (subsample < 1) throw Error("subsample must be at least 1");
  RegretTrace trace;
  const auto T = static_cast<long long>(rewards.size());
  double cumulative = 0.0;
  for (long long t = 1; t <= T; ++t) {
    const double r = rewards[static_cast<std::size_t>(t - 1)];
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error("reward outside [0,1] at step " + std::to_string(t));
    }
    cumulative += optimal_gain - r;
    if (t % subsample == 0 || t == T) {
      trace.t.push_back(t);
      trace.cum_regret.push_back(cumulative);
    }
  }
  return trace;
}

RunRecord run_single(const ResolvedAlgo& algo, const Mdp& mdp,
                     long long steps, std::uint64_t master_seed,
                     std::uint64_t seed) {
  RunRecord record;
  record.algo = algo.id;
  record.seed = seed;
  Simulator sim(mdp, Rng::substream(master_seed, algo.id, seed, kEnvStream));
  Rng agent_rng = Rng::substream(master_seed, algo.id, seed, kAgentStream);
  record.rewards.reserve(static_cast<std::size_t>(steps));

  if (const auto* q = std::get_if<OptQConfig>(&algo.config)) {
    OptimisticQLearner learner(mdp.num_states(), mdp.num_actions(), *q);
    for (long long t = 0; t < steps; ++t) {
      const int s = sim.state();
      const int a = learner.choose_action(s);
      const StepResult result = sim.step(a);
      learner.update(s, a, result.reward, result.next_state);
      record.rewards.push_back(result.reward);
    }
  } else if (const auto* o = std::get_if<OomdConfig>(&algo.config)) {
    OomdRunResult result = run_mdp_oomd(sim, *o, steps, agent_rng);
    record.rewards = std::move(result.rewards);
    record.oomd_stats = result.stats;
  } else {
    EpsGreedyQLearner learner(mdp.num_states(), mdp.num_actions(),
                              std::get<EpsGreedyConfig>(algo.config));
    for (long long t = 0; t < steps; ++t) {
      const int s = sim.state();
      const int a = learner.choose_action(s, agent_rng);
      const StepResult result = sim.step(a);
      learner.update(s, a, result.reward, result.next_state);
      record.rewards.push_back(result.reward);
    }
  }
  return record;
}

AggregateTrace aggregate_traces(std::span<const RegretTrace> traces) {
  if (traces.empty()) throw Error("nothing to aggregate");
  AggregateTrace out;
  out.algo = traces.front().algo;
  out.t = traces.front().t;
  const std::size_t points = out.t.size();
  const double n = static_cast<double>(traces.size());
  out.mean.assign(points, 0.0);
  out.stddev.assign(points, 0.0);
  for (const auto& trace : traces) {
    if (trace.t != out.t) throw Error("traces are not aligned");
  }
  for (std::size_t i = 0; i < points; ++i) {
    double total = 0.0;
    for (const auto& trace : traces) total += trace.cum_regret[i];
    const double mean = total / n;
    double squares = 0.0;
    for (const auto& trace : traces) {
      const double d = trace.cum_regret[i] - mean;
      squares += d * d;
    }
    out.mean[i] = mean;
    out.stddev[i] = traces.size() > 1 ? std::sqrt(squares / (n - 1.0)) : 0.0;
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Mdp mdp = config.env.build();
  const ModelSummary model = summarize_model(mdp);

  std::vector<ResolvedAlgo> algos;
  for (const auto& spec : config.algorithms) {
    algos.push_back(
        resolve_algorithm(spec, config.env, mdp, model, config.steps));
  }

  struct Job {
    std::size_t algo;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < algos.size(); ++i) {
    for (std::uint64_t seed : config.seeds) jobs.push_back({i, seed});
  }

  std::vector<RegretTrace> traces(jobs.size());
  std::vector<std::optional<OomdRunStats>> stats(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next_job{0};
  auto worker = [&] {
    for (std::size_t j = next_job++; j < jobs.size(); j = next_job++) {
      try {
        RunRecord record = run_single(algos[jobs[j].algo], mdp, config.steps,
                                      config.master_seed, jobs[j].seed);
        traces[j] = compute_regret(model.optimal.gain, record.rewards,
                                   config.subsample);
        traces[j].algo = record.algo;
        traces[j].seed = record.seed;
        stats[j] = record.oomd_stats;
      } catch (...) {
        failures[j] = std::current_exception();
      }
    }
  };
  unsigned workers = config.workers ? config.workers
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(jobs.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!failures[j]) continue;
    std::string reason = "unknown error";
    try {
      std::rethrow_exception(failures[j]);
    } catch (const std::exception& e) {
      reason = e.what();
    } catch (...) {
    }
    throw Error("run failed for algo " + algos[jobs[j].algo].id + ", seed " +
                std::to_string(jobs[j].seed) + ": " + reason);
  }

  ExperimentResult result;
  result.traces = std::move(traces);
  const std::size_t per_algo = config.seeds.size();
  for (std::size_t i = 0; i < algos.size(); ++i) {
    result.aggregates.push_back(aggregate_traces(std::span<const RegretTrace>(
        result.traces.data() + i * per_algo, per_algo)));
  }

  json runs = json::array();
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    json run{{"algo", result.traces[j].algo},
             {"seed", result.traces[j].seed},
             {"final_regret", result.traces[j].cum_regret.back()}};
    if (stats[j]) run["oomd"] = stats_to_json(*stats[j]);
    runs.push_back(std::move(run));
  }
  json resolved = json::array();
  for (const auto& algo : algos) resolved.push_back(algo.to_json());
  result.metadata = json{
      {"software", {{"name", "avgrl"}, {"version", software_version()}}},
      {"rng", std::string(Rng::kAlgorithm)},
      {"environment", config.env.to_json()},
      {"num_states", mdp.num_states()},
      {"num_actions", mdp.num_actions()},
      {"model", model.to_json()},
      {"config",
       {{"steps", config.steps},
        {"seeds", config.seeds},
        {"master_seed", config.master_seed},
        {"subsample", config.subsample}}},
      {"algorithms", resolved},
      {"runs", runs}};

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    write_raw_csv(config.output_dir / "raw.csv", result.traces);
    write_aggregate_csv(config.output_dir / "aggregate.csv",
                        result.aggregates);
    std::ofstream meta(config.output_dir / "metadata.json");
    if (!meta) throw Error("cannot write metadata.json");
    meta << result.metadata.dump(2) << '\n';
  }
  return result;
}

// -- Statistics and files -----------------------------------------------------

double fit_loglog_slope(const RegretTrace& trace, double window) {
  if (!(window > 0.0 && window <= 1.0)) {
    throw Error("slope window must lie in (0,1]");
  }
  if (trace.t.empty()) throw Error("empty regret trace");
  const double start =
      (1.0 - window) * static_cast<double>(trace.t.back());
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (static_cast<double>(trace.t[i]) < start) continue;
    if (!(trace.cum_regret[i] > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(trace.t[i])));
    ys.push_back(std::log(trace.cum_regret[i]));
  }
  if (xs.size() < 10) {
    throw Error("fewer than 10 positive regret points in the slope window");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) throw Error("slope window spans a single time point");
  return sxy / sxx;
}

void write_raw_csv(const std::filesystem::path& path,
                   std::span<const RegretTrace> traces) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,algo,seed,cum_regret\n";
  for (const auto& trace : traces) {
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
      out << trace.t[i] << ',' << trace.algo << ',' << trace.seed << ','
          << format_double(trace.cum_regret[i]) << '\n';
    }
  }
}

void write_aggregate_csv(const std::filesystem::path& path,
                         std::span<const AggregateTrace> aggregates) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,algo,regret_mean,regret_std\n";
  for (const auto& agg : aggregates) {
    for (std::size_t i = 0; i < agg.t.size(); ++i) {
      out << agg.t[i] << ',' << agg.algo << ',' << format_double(agg.mean[i])
          << ',' << format_double(agg.stddev[i]) << '\n';
    }
  }
}

std::vector<RegretTrace> read_raw_csv(const std::filesystem::path& path) {
  std::ifstream in = open_csv(path, "t,algo,seed,cum_regret");
  std::vector<RegretTrace> traces;
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> index;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) throw Error("malformed raw CSV line: " + line);
    const auto key = std::make_pair(fields[1], std::stoull(fields[2]));
    auto [it, inserted] = index.try_emplace(key, traces.size());
    if (inserted) {
      traces.push_back({});
      traces.back().algo = key.first;
      traces.back().seed = key.second;
    }
    traces[it->second].t.push_back(std::stoll(fields[0]));
    traces[it->second].cum_regret.push_back(std::stod(fields[3]));
  }
  return traces;
}

std::vector<AggregateTrace> read_aggregate_csv(
    const std::filesystem::path& path) {
  std::ifstream in = open_csv(path, "t,algo,regret_mean,regret_std");
  std::vector<AggregateTrace> aggregates;
  std::map<std::string, std::size_t> index;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw Error("malformed aggregate CSV line: " + line);
    }
    auto [it, inserted] = index.try_emplace(fields[1], aggregates.size());
    if (inserted) {
      aggregates.push_back({});
      aggregates.back().algo = fields[1];
    }
    auto& agg = aggregates[it->second];
    agg.t.push_back(std::stoll(fields[0]));
    agg.mean.push_back(std::stod(fields[2]));
    agg.stddev.push_back(std::stod(fields[3]));
  }
  return aggregates;
}

RegretTrace read_mean_trace(const std::filesystem::path& aggregate_csv,
                            const std::string& algo) {
  for (auto& agg : read_aggregate_csv(aggregate_csv)) {
    if (agg.algo != algo) continue;
    RegretTrace trace;
    trace.algo = algo;
    trace.t = std::move(agg.t);
    trace.cum_regret = std::move(agg.mean);
    return trace;
  }
  throw Error("algorithm '" + algo + "' not found in " +
              aggregate_csv.string());
}

}  // namespace avgrl
