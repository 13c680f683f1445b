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

#ifndef MBMRL_CLI_CONFIG_HPP_
#define MBMRL_CLI_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbmrl/envs/registry.hpp"
#include "mbmrl/meta/adapt.hpp"
#include "mbmrl/meta/meta_model.hpp"
#include "mbmrl/mpc/mbrl.hpp"

namespace mbmrl::cli {

struct EvalConfig {
  std::size_t episodes = 4;
  std::size_t steps = 500;
  std::vector<std::string> conditions;  // short form or JSON text
  std::vector<std::string> models;      // artifact stems
  std::vector<std::string> labels;      // optional, one per model
  bool save_logs = true;
};

// Everything a command needs. Relative artifact paths are resolved against
// the working directory.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out = "run";
  std::string env_name = "friction_cart";
  nlohmann::json env_params = nlohmann::json::object();
  ConditionSpec condition;
  std::optional<ConstraintLimits> limits;  // env defaults when unset
  RewardSpec reward;
  VdesSchedule v_des = VdesSchedule::constant(0.5);
  MpcConfig mpc;
  ExpertConfig expert;
  MetaTrainConfig meta;
  AdaptConfig adapt;
  EvalConfig eval;
  std::vector<std::string> meta_datasets;

  std::unique_ptr<Env> make() const { return make_env(env_name, env_params); }

  ConstraintLimits resolved_limits(const Env& env) const {
    return limits ? *limits : env.default_limits();
  }

  // The top-level seed drives every stochastic component.
  void set_seed(std::uint64_t s) {
    seed = s;
    expert.seed = s;
    meta.seed = s;
  }

  EpisodeConfig episode_config(const Env& env, std::size_t steps) const {
    EpisodeConfig ec;
    ec.steps = steps;
    ec.mpc = mpc;
    ec.limits = resolved_limits(env);
    ec.reward = reward;
    ec.v_des = v_des;
    ec.seed = seed;
    return ec;
  }
};

inline ConditionSpec condition_from_any(const nlohmann::json& j) {
  if (j.is_string()) return parse_condition(j.get<std::string>());
  return condition_from_json(j);
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.out = j.value("out", c.out);
    if (j.contains("env")) {
      const auto& e = j.at("env");
      c.env_name = e.value("name", c.env_name);
      c.env_params = e.value("params", nlohmann::json::object());
    }
    if (j.contains("condition")) c.condition = condition_from_any(j.at("condition"));
    if (j.contains("reward")) c.reward = reward_from_json(j.at("reward"));
    if (j.contains("v_des")) c.v_des = vdes_from_json(j.at("v_des"));
    if (j.contains("mpc")) c.mpc = mpc_config_from_json(j.at("mpc"));
    if (j.contains("expert")) c.expert = expert_config_from_json(j.at("expert"));
    if (j.contains("meta")) c.meta = meta_config_from_json(j.at("meta"));
    if (j.contains("adapt")) c.adapt = adapt_config_from_json(j.at("adapt"));
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      c.eval.episodes = e.value("episodes", c.eval.episodes);
      c.eval.steps = e.value("steps", c.eval.steps);
      if (e.contains("conditions")) {
        for (const auto& x : e.at("conditions")) {
          c.eval.conditions.push_back(x.is_string() ? x.get<std::string>() : x.dump());
        }
      }
      c.eval.models = e.value("models", c.eval.models);
      c.eval.labels = e.value("labels", c.eval.labels);
      c.eval.save_logs = e.value("save_logs", c.eval.save_logs);
    }
    c.meta_datasets = j.value("meta_datasets", c.meta_datasets);
    c.set_seed(c.seed);
    auto env = c.make();
    if (j.contains("limits") && !j.at("limits").is_null()) {
      c.limits = limits_from_json(j.at("limits"), env->descriptor().dt);
    }
    const ConstraintLimits lim = c.resolved_limits(*env);
    check_dim(lim.dims(), env->descriptor().action_dim, "config limits");
    if (std::abs(lim.dt - env->descriptor().dt) > 1e-12) {
      throw ConfigError("config: limits dt must match the env control period");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(str_cat("config: ", e.what()));
  }
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  try {
    return run_config_from_json(nn::read_json_file(path));
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

// Fully expanded config, written beside every run's outputs. The output
// directory is left out so reruns elsewhere produce identical files.
inline nlohmann::json run_config_to_json(const RunConfig& c) {
  auto env = c.make();
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& s : c.eval.conditions) conds.push_back(s);
  return {{"seed", c.seed},
          {"env", {{"name", c.env_name}, {"params", c.env_params}}},
          {"condition", condition_to_json(c.condition)},
          {"limits", limits_to_json(c.resolved_limits(*env))},
          {"reward", reward_to_json(c.reward)},
          {"v_des", vdes_to_json(c.v_des)},
          {"mpc", mpc_config_to_json(c.mpc)},
          {"expert", expert_config_to_json(c.expert)},
          {"meta", meta_config_to_json(c.meta)},
          {"adapt", adapt_config_to_json(c.adapt)},
          {"eval",
           {{"episodes", c.eval.episodes},
            {"steps", c.eval.steps},
            {"conditions", conds},
            {"models", c.eval.models},
            {"labels", c.eval.labels},
            {"save_logs", c.eval.save_logs}}},
          {"meta_datasets", c.meta_datasets}};
}

}  // namespace mbmrl::cli

#endif  // MBMRL_CLI_CONFIG_HPP_
