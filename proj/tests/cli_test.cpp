#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "avgrl/envs.hpp"
#include "avgrl/harness.hpp"

namespace {

namespace fs = std::filesystem;

struct Output {
  int status;
  std::string text;
};

Output run_cli(const std::string& args) {
  const std::string cmd = std::string(AVGRL_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string text;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) text += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), text};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("avgrl_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Cli, SolvePrintsModelJson) {
  const Output out = run_cli("solve --env jump-river-swim");
  ASSERT_EQ(out.status, 0) << out.text;
  const auto doc = nlohmann::json::parse(out.text);
  const auto exact =
      avgrl::solve_optimal_average(avgrl::make_jump_river_swim(0.01), 1e-10);
  EXPECT_EQ(doc["model"]["gain"].get<double>(), exact.gain);
  EXPECT_GE(doc["model"]["rho"].get<double>(), 6.0);
}

TEST(Cli, SolveRandomMdpUsesEnvSeed) {
  const Output a = run_cli("solve --env random-mdp --env-seed 3");
  const Output b = run_cli("solve --env random-mdp --env-seed 4");
  ASSERT_EQ(a.status, 0);
  ASSERT_EQ(b.status, 0);
  EXPECT_NE(a.text, b.text);
}

TEST(Cli, RunThenSlope) {
  const fs::path out = scratch("run");
  const Output run = run_cli(
      "run --env jump-river-swim --algo optq --H 100 --bonus-coef 1 "
      "--steps 20000 --seeds 2 --master-seed 1 --subsample 100 --out " +
      out.string());
  ASSERT_EQ(run.status, 0) << run.text;
  EXPECT_TRUE(fs::exists(out / "raw.csv"));
  EXPECT_TRUE(fs::exists(out / "aggregate.csv"));
  EXPECT_TRUE(fs::exists(out / "metadata.json"));
  const Output slope = run_cli("slope --in " + (out / "aggregate.csv").string() +
                               " --algo optq --window 0.9");
  ASSERT_EQ(slope.status, 0) << slope.text;
  const double expected = avgrl::fit_loglog_slope(
      avgrl::read_mean_trace(out / "aggregate.csv", "optq"), 0.9);
  EXPECT_NEAR(std::stod(slope.text), expected, 1e-6);
}

TEST(Cli, AlgorithmFlagsReachTheConfig) {
  const fs::path out = scratch("flags");
  const Output run = run_cli(
      "run --env random-mdp --env-seed 2 --algo oomd --N 3 --B 12 --eta 0.02 "
      "--steps 1200 --seeds 1 --out " + out.string());
  ASSERT_EQ(run.status, 0) << run.text;
  const auto meta = nlohmann::json::parse(slurp(out / "metadata.json"));
  const auto& algo = meta["algorithms"][0];
  EXPECT_EQ(algo["N"], 3);
  EXPECT_EQ(algo["B"], 12);
  EXPECT_EQ(algo["eta"].get<double>(), 0.02);

  const fs::path eps = scratch("eps");
  ASSERT_EQ(run_cli("run --env random-mdp --algo eps-greedy --epsilon 0.2 "
                    "--H 50 --steps 100 --seeds 1 --out " + eps.string())
                .status,
            0);
  const auto eps_meta = nlohmann::json::parse(slurp(eps / "metadata.json"));
  EXPECT_EQ(eps_meta["algorithms"][0]["epsilon"].get<double>(), 0.2);
  EXPECT_EQ(eps_meta["algorithms"][0]["H"].get<double>(), 50.0);
}

TEST(Cli, RepeatedRunIsBitIdentical) {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const std::string args =
      "run --env random-mdp --algo eps-greedy --steps 5000 --seeds 3 "
      "--master-seed 9 --subsample 50 --out ";
  ASSERT_EQ(run_cli(args + a.string()).status, 0);
  ASSERT_EQ(run_cli(args + b.string()).status, 0);
  EXPECT_EQ(slurp(a / "raw.csv"), slurp(b / "raw.csv"));
  EXPECT_EQ(slurp(a / "aggregate.csv"), slurp(b / "aggregate.csv"));
}

TEST(Cli, ErrorsExitNonzeroWithDiagnostic) {
  const Output bad_algo = run_cli(
      "run --env jump-river-swim --algo politex --steps 10 --out /tmp/x");
  EXPECT_NE(bad_algo.status, 0);
  EXPECT_NE(bad_algo.text.find("politex"), std::string::npos);
  const Output exclusive = run_cli(
      "run --env jump-river-swim --algo optq --bonus-coef 1 --span-bound 2 "
      "--steps 10 --out /tmp/x");
  EXPECT_NE(exclusive.status, 0);
  EXPECT_NE(run_cli("solve --env /nonexistent.json").status, 0);
  EXPECT_NE(run_cli("slope --in /nonexistent.csv --algo optq").status, 0);
  EXPECT_NE(run_cli("").status, 0);
}

}  // namespace
