// Copyright 2026 The mbmrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "mbmrl/cli/commands.hpp"

namespace mbmrl::cli {
namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "mbmrl_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// File contents with timestamp lines dropped.
std::string body(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"created_at\"") != std::string::npos) continue;
    out += line + "\n";
  }
  return out;
}

void expect_same_tree(const fs::path& a, const fs::path& b) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a);
    ASSERT_TRUE(fs::exists(b / rel)) << rel;
    EXPECT_EQ(body(e.path()), body(b / rel)) << rel;
    ++n;
  }
  EXPECT_GT(n, 0u);
}

nlohmann::json tiny_expert(const std::string& cond, const fs::path& out) {
  return {{"seed", 5},
          {"out", out.string()},
          {"condition", cond},
          {"mpc", {{"horizon", 4}, {"population", 20}}},
          {"expert",
           {{"n_init", 2},
            {"n_training", 3},
            {"steps", 100},
            {"hidden", {8, 8}},
            {"train", {{"epochs", 3}, {"batch_size", 32}}}}}};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MBMRL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(Cli, TrainExpertWritesArtifactsAndIsDeterministic) {
  const fs::path root = scratch("train");
  const RunConfig a = run_config_from_json(tiny_expert("friction=0.8", root / "a"));
  RunConfig b = a;
  b.out = (root / "b").string();
  const ExpertResult r = cmd_train_expert(a);
  cmd_train_expert(b);
  for (const char* f : {"config.resolved.json", "model.bin", "model.json", "dataset.csv",
                        "dataset.json", "episodes.csv", "loss_curve.csv"}) {
    EXPECT_TRUE(fs::exists(root / "a" / f)) << f;
  }
  expect_same_tree(root / "a", root / "b");
  EXPECT_EQ(read_table(root / "a" / "episodes.csv").rows.size(), 5u);

  // artifacts load back losslessly
  const Dataset d = load_dataset(root / "a" / "dataset");
  EXPECT_TRUE(d.inputs() == r.dataset.inputs());
  const LoadedModel m = load_model(root / "a" / "model");
  EXPECT_TRUE(m.model.weights().flat() == r.model.weights().flat());
  const RunConfig again = load_run_config(root / "a" / "config.resolved.json");
  EXPECT_EQ(run_config_to_json(again), run_config_to_json(a));
}

TEST(Cli, LinearConfigLearnsModelExactly) {
  RunConfig c = load_run_config(fs::path(MBMRL_SAMPLES_DIR) / "configs" / "linear_expert.json");
  c.out = scratch("linear").string();
  const ExpertResult r = cmd_train_expert(c);
  EXPECT_LT(r.reports.back().final_loss, 1e-5);
}

TEST(Cli, MetaTrainNeedsTwoDatasetsAndRecordsLatents) {
  const fs::path root = scratch("meta");
  std::vector<std::string> stems;
  for (const char* mu : {"0.2", "0.4", "0.6"}) {
    const fs::path out = root / (std::string("e") + mu);
    cmd_train_expert(run_config_from_json(tiny_expert(std::string("friction=") + mu, out)));
    stems.push_back((out / "dataset").string());
  }
  nlohmann::json j = {{"seed", 1},
                      {"out", (root / "m1").string()},
                      {"meta_datasets", {stems[0]}},
                      {"meta", {{"n_outer", 30}, {"hidden", {8}}, {"latent_dim", 2}}}};
  EXPECT_THROW(cmd_meta_train(run_config_from_json(j)), ConfigError);
  j["meta_datasets"] = stems;
  const MetaModel mm = cmd_meta_train(run_config_from_json(j));
  EXPECT_EQ(mm.latents.size(), 3u);
  EXPECT_EQ(load_meta_model(root / "m1" / "meta").latents.size(), 3u);
  EXPECT_EQ(read_table(root / "m1" / "meta_curve.csv").rows.size(), 30u);
  j["out"] = (root / "m2").string();
  cmd_meta_train(run_config_from_json(j));
  expect_same_tree(root / "m1", root / "m2");

  // eval over meta + one expert, with logs, then replay one log
  nlohmann::json ev = {
      {"seed", 3},
      {"out", (root / "eval").string()},
      {"mpc", {{"horizon", 4}, {"population", 20}}},
      {"eval",
       {{"episodes", 2},
        {"steps", 30},
        {"models", {(root / "m1" / "meta").string(), (root / "e0.2" / "model").string()}},
        {"labels", {"meta", "expert"}},
        {"conditions", {"friction=0.3", "ramp=0.8:0.1:0.6"}}}}};
  const auto rows = cmd_eval(run_config_from_json(ev));
  EXPECT_EQ(rows.size(), 8u);
  const Table metrics = read_table(root / "eval" / "metrics.csv");
  EXPECT_EQ(metrics.rows.size(), 8u);
  EXPECT_EQ(read_table(root / "eval" / "summary.csv").rows.size(), 4u);
  const Table log = read_table(root / "eval" / "logs" / "m0_c1_e0.csv");
  EXPECT_TRUE(log.column("loss_2").has_value());
  cmd_replay(root / "eval" / "logs" / "m0_c1_e0", root / "replay");
  EXPECT_EQ(read_table(root / "replay" / "condition_trace.csv").rows.size(), 30u);
  EXPECT_EQ(read_table(root / "replay" / "velocity_trace.csv").rows.size(), 30u);
}

TEST(Cli, EvalWithZeroEpisodesWritesEmptyTable) {
  const fs::path root = scratch("eval0");
  nlohmann::json j = {{"out", root.string()}, {"eval", {{"episodes", 0}}}};
  EXPECT_TRUE(cmd_eval(run_config_from_json(j)).empty());
  const Table t = read_table(root / "metrics.csv");
  EXPECT_TRUE(t.rows.empty());
  EXPECT_FALSE(t.header.empty());
}

void write_metric_table(const fs::path& p, const std::vector<double>& v) {
  Table t;
  t.header = {"episode", "tracking_error"};
  for (std::size_t i = 0; i < v.size(); ++i) t.rows.push_back({std::to_string(i), num(v[i])});
  t.save(p);
}

TEST(Cli, CompareVerdicts) {
  const fs::path root = scratch("compare");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> a, b;
  for (int i = 0; i < 20; ++i) {
    a.push_back(n(rng));
    b.push_back(3.0 + n(rng));
  }
  write_metric_table(root / "a.csv", a);
  write_metric_table(root / "b.csv", b);
  write_metric_table(root / "one.csv", {1.0});

  const auto same = cmd_compare(root / "a.csv", root / "a.csv");
  EXPECT_NEAR(same["metrics"]["tracking_error"]["p"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(same["metrics"]["tracking_error"]["stars"], "");
  EXPECT_FALSE(same["metrics"].contains("episode"));

  const auto shifted = cmd_compare(root / "a.csv", root / "b.csv");
  EXPECT_LT(shifted["metrics"]["tracking_error"]["p"].get<double>(), 0.001);
  EXPECT_EQ(shifted["metrics"]["tracking_error"]["stars"], "***");
  EXPECT_EQ(shifted["metrics"]["tracking_error"]["verdict"], "a<b");

  EXPECT_THROW(cmd_compare(root / "one.csv", root / "a.csv"), ConfigError);
  Table other;
  other.header = {"episode", "odometry"};
  other.rows = {{"0", "1"}, {"1", "2"}};
  other.save(root / "other.csv");
  EXPECT_THROW(cmd_compare(root / "a.csv", root / "other.csv"), ConfigError);
}

TEST(Cli, BinaryExitCodes) {
  const fs::path root = scratch("exit");
  write_metric_table(root / "a.csv", {1.0, 2.0, 3.0});
  write_metric_table(root / "one.csv", {1.0});
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("compare " + (root / "a.csv").string() + " " + (root / "a.csv").string()), 0);
  EXPECT_EQ(run_cli("compare " + (root / "one.csv").string() + " " + (root / "a.csv").string()), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  {
    std::ofstream bad(root / "bad.json");
    bad << "{\"mpc\": {\"horizon\": 0}}";
  }
  EXPECT_EQ(run_cli("train-expert --config " + (root / "bad.json").string()), 1);
  {
    std::ofstream huge(root / "diverge.json");
    huge << nlohmann::json{{"out", (root / "div").string()},
                           {"env", {{"name", "linear"}}},
                           {"expert", {{"n_init", 1}, {"n_training", 1}, {"steps", 20},
                                       {"hidden", {4}},
                                       {"train", {{"epochs", 1}, {"batch_size", 4},
                                                  {"learning_rate", 1e300}}}}}}
                                .dump();
  }
  EXPECT_EQ(run_cli("train-expert --config " + (root / "diverge.json").string()), 2);
  EXPECT_EQ(run_cli("eval --episodes 0 --out " + (root / "e0").string()), 0);
}

}  // namespace
}  // namespace mbmrl::cli
