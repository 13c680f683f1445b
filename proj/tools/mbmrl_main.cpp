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

// mbmrl command line. Exit codes: 0 ok, 1 validation, 2 runtime.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mbmrl/cli/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> episodes;
  std::optional<std::string> condition;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "run config (JSON)")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "top-level seed");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--episodes", o.episodes, "episode count");
  app->add_option("--condition", o.condition, "condition (short form or JSON)");
}

mbmrl::cli::RunConfig resolve(const Overrides& o, bool eval) {
  mbmrl::cli::RunConfig c = o.config.empty()
                                ? mbmrl::cli::run_config_from_json(nlohmann::json::object())
                                : mbmrl::cli::load_run_config(o.config);
  if (o.seed) c.set_seed(*o.seed);
  if (o.out) c.out = *o.out;
  if (o.episodes) {
    if (eval) {
      c.eval.episodes = *o.episodes;
    } else {
      // expert episode budget keeps its random warm-up
      if (*o.episodes <= c.expert.n_init) {
        throw mbmrl::ConfigError("--episodes must exceed expert.n_init");
      }
      c.expert.n_training = *o.episodes - c.expert.n_init;
    }
  }
  if (o.condition) {
    if (eval) {
      c.eval.conditions = {*o.condition};
    } else {
      c.condition = mbmrl::parse_condition(*o.condition);
    }
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"model-based meta-RL on learned dynamics"};
  app.require_subcommand(1);

  Overrides te, mt, ev;
  auto* train = app.add_subcommand("train-expert", "train one expert model");
  add_common(train, te);
  auto* meta = app.add_subcommand("meta-train", "meta-train over expert datasets");
  add_common(meta, mt);
  std::vector<std::string> datasets;
  meta->add_option("--dataset", datasets, "dataset stem (repeatable)");
  auto* eval = app.add_subcommand("eval", "evaluate models over conditions");
  add_common(eval, ev);
  std::vector<std::string> models;
  eval->add_option("--model", models, "model stem (repeatable)");

  auto* compare = app.add_subcommand("compare", "Welch t-test between two metric tables");
  std::string table_a, table_b;
  compare->add_option("a", table_a, "metrics CSV")->required();
  compare->add_option("b", table_b, "metrics CSV")->required();

  auto* replay = app.add_subcommand("replay", "re-emit plot CSVs from an episode log");
  std::string log_stem, replay_out = "replay";
  replay->add_option("log", log_stem, "episode log stem (without .csv)")->required();
  replay->add_option("--out", replay_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*train) {
      auto res = mbmrl::cli::cmd_train_expert(resolve(te, false));
      const auto& last = res.episodes.back();
      std::cout << "episodes " << res.episodes.size() << " last tracking_error "
                << last.tracking_error << "\n";
    } else if (*meta) {
      auto c = resolve(mt, false);
      if (!datasets.empty()) c.meta_datasets = datasets;
      auto mm = mbmrl::cli::cmd_meta_train(c);
      std::cout << "conditions " << mm.latents.size() << "\n";
    } else if (*eval) {
      auto c = resolve(ev, true);
      if (!models.empty()) c.eval.models = models;
      auto rows = mbmrl::cli::cmd_eval(c);
      std::cout << "rows " << rows.size() << "\n";
    } else if (*compare) {
      std::cout << mbmrl::cli::cmd_compare(table_a, table_b).dump(2) << "\n";
    } else if (*replay) {
      mbmrl::cli::cmd_replay(log_stem, replay_out);
    }
  } catch (const mbmrl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mbmrl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
