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

#ifndef MBMRL_MPC_MBRL_HPP_
#define MBMRL_MPC_MBRL_HPP_

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbmrl/dynamics/collect.hpp"
#include "mbmrl/dynamics/train.hpp"
#include "mbmrl/mpc/episode.hpp"

namespace mbmrl {

// Model-based RL loop for one fixed condition: N_init random episodes, then
// N_training rounds of (train on D, run one MPC episode, grow D).
struct ExpertConfig {
  std::size_t n_init = 2;
  std::size_t n_training = 48;
  std::size_t steps = 500;
  std::vector<std::size_t> hidden = {256, 256};
  TrainConfig train;
  bool final_train = true;       // retrain once on the full D at the end
  std::size_t dataset_capacity = 0;  // 0: unlimited
  std::uint64_t seed = 0;

  void validate() const {
    if (n_init < 1) throw ConfigError("expert: n_init must be >= 1");
    train.validate();
  }
};

inline nlohmann::json expert_config_to_json(const ExpertConfig& c) {
  return {{"n_init", c.n_init},
          {"n_training", c.n_training},
          {"steps", c.steps},
          {"hidden", c.hidden},
          {"train", train_config_to_json(c.train)},
          {"final_train", c.final_train},
          {"dataset_capacity", c.dataset_capacity},
          {"seed", c.seed}};
}

inline ExpertConfig expert_config_from_json(const nlohmann::json& j) {
  ExpertConfig c;
  c.n_init = j.value("n_init", c.n_init);
  c.n_training = j.value("n_training", c.n_training);
  c.steps = j.value("steps", c.steps);
  c.hidden = j.value("hidden", c.hidden);
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"));
  c.final_train = j.value("final_train", c.final_train);
  c.dataset_capacity = j.value("dataset_capacity", c.dataset_capacity);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

struct EpisodeMetrics {
  std::size_t episode = 0;
  std::string controller;       // "random" or "mpc"
  std::size_t steps = 0;
  double tracking_error = 0.0;  // mean |v - v_des|
  double tracking_reward = 0.0; // mean -(v - v_des)^2
  double total_reward = 0.0;
  double odometry = 0.0;
  double mean_abs_jerk = 0.0;
  bool terminated_early = false;
  double train_loss = std::numeric_limits<double>::quiet_NaN();
};

inline EpisodeMetrics episode_metrics(const EpisodeLog& log, std::size_t velocity_index) {
  EpisodeMetrics m;
  m.steps = log.steps.size();
  m.tracking_error = log.mean_tracking_error(velocity_index);
  double tr = 0.0;
  for (const auto& s : log.steps) {
    const double e = s.state[static_cast<Eigen::Index>(velocity_index)] - s.v_des;
    tr -= e * e;
  }
  m.tracking_reward = log.steps.empty() ? 0.0 : tr / static_cast<double>(log.steps.size());
  m.total_reward = log.total_reward();
  m.odometry = log.steps.empty() ? 0.0 : log.steps.back().odometry;
  m.mean_abs_jerk = log.mean_abs_jerk(log.env.dt);
  m.terminated_early = log.terminated_early;
  m.controller = "mpc";
  return m;
}

struct ExpertResult {
  DynamicsModel model;
  Dataset dataset;
  std::vector<EpisodeMetrics> episodes;  // random episodes first
  std::vector<TrainReport> reports;      // one per training call
};

// Random-controller episodes replayed as logs so they share the metric code.
inline EpisodeLog random_episode(Env& env, const ConditionSpec& condition,
                                 const ConstraintLimits& lim, const RewardSpec& reward,
                                 std::size_t steps, std::uint64_t seed) {
  EpisodeLog log;
  log.env = env.descriptor();
  log.condition_tag = condition.tag();
  env.set_reward(reward);
  State s = env.reset(condition, derive_seed(seed, 0));
  log.initial_state = s;
  log.initial_action = env.initial_action();
  if (steps == 0) return log;
  const SequenceBatch seq = sample_sequences(
      ActionHistory::constant(log.initial_action), lim, steps, 1, derive_seed(seed, 1));
  for (std::size_t t = 0; t < steps; ++t) {
    StepLog sl;
    sl.time = env.time();
    sl.action = seq.action(t, 0);
    StepResult r = env.step(sl.action);
    sl.state = r.state;
    sl.reward = r.reward;
    sl.v_des = reward.v_des;
    sl.odometry = env.odometry();
    log.steps.push_back(std::move(sl));
    if (r.done || !r.state.allFinite()) {
      log.terminated_early = t + 1 < steps;
      break;
    }
  }
  return log;
}

inline void append_log(Dataset& d, const EpisodeLog& log, std::size_t episode) {
  State s = log.initial_state;
  for (std::size_t t = 0; t < log.steps.size(); ++t) {
    if (!log.steps[t].state.allFinite()) break;
    d.add(episode, t, s, log.steps[t].action, log.steps[t].state);
    s = log.steps[t].state;
  }
}

using EpisodeCallback = std::function<void(const EpisodeMetrics&, const EpisodeLog&)>;

inline ExpertResult train_expert(Env& env, const ConditionSpec& condition,
                                 const ExpertConfig& cfg, const EpisodeConfig& ep,
                                 const EpisodeCallback& on_episode = nullptr) {
  cfg.validate();
  const EnvDescriptor desc = env.descriptor();
  Dataset d(desc.state_dim, desc.action_dim, condition.tag(),
            {{"env", descriptor_to_json(desc)},
             {"condition", condition_to_json(condition)},
             {"seed", cfg.seed},
             {"controller", "mbrl"}});
  d.set_capacity(cfg.dataset_capacity);
  ExpertResult res{DynamicsModel(desc.state_dim, desc.action_dim, 0, cfg.hidden,
                                 derive_seed(cfg.seed, 1)),
                   d, {}, {}};
  const std::size_t vi = ep.reward.velocity_index;
  std::size_t episode = 0;

  for (std::size_t e = 0; e < cfg.n_init; ++e, ++episode) {
    EpisodeLog log = random_episode(env, condition, ep.limits, ep.reward, cfg.steps,
                                    derive_seed(cfg.seed, 1000 + episode));
    append_log(res.dataset, log, episode);
    EpisodeMetrics m = episode_metrics(log, vi);
    m.episode = episode;
    m.controller = "random";
    if (on_episode) on_episode(m, log);
    res.episodes.push_back(m);
  }

  auto fit = [&](std::size_t round) {
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.train.seed, round);
    tc.batch_size = std::min(tc.batch_size, res.dataset.size());
    res.reports.push_back(train(res.model, res.dataset, tc));
    return res.reports.back().final_loss;
  };

  for (std::size_t k = 0; k < cfg.n_training; ++k, ++episode) {
    const double loss = fit(k);
    FixedModel provider(res.model);
    EpisodeConfig ec = ep;
    ec.steps = cfg.steps;
    ec.seed = derive_seed(cfg.seed, 1000 + episode);
    EpisodeLog log = run_episode(env, condition, provider, ec);
    append_log(res.dataset, log, episode);
    EpisodeMetrics m = episode_metrics(log, vi);
    m.episode = episode;
    m.train_loss = loss;
    if (on_episode) on_episode(m, log);
    res.episodes.push_back(m);
  }
  if (cfg.final_train) fit(cfg.n_training);
  return res;
}

}  // namespace mbmrl

#endif  // MBMRL_MPC_MBRL_HPP_
