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

#ifndef MBMRL_ENVS_ENV_HPP_
#define MBMRL_ENVS_ENV_HPP_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbmrl/common.hpp"
#include "mbmrl/envs/condition.hpp"
#include "mbmrl/mpc/reward.hpp"
#include "mbmrl/sampler/limits.hpp"

namespace mbmrl {

struct EnvDescriptor {
  std::string name;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  double dt = 0.02;
  std::vector<std::string> state_labels;
  std::vector<std::string> action_labels;
  std::string action_semantic;
};

inline nlohmann::json descriptor_to_json(const EnvDescriptor& d) {
  return {{"name", d.name},
          {"state_dim", d.state_dim},
          {"action_dim", d.action_dim},
          {"dt", d.dt},
          {"state_labels", d.state_labels},
          {"action_labels", d.action_labels},
          {"action_semantic", d.action_semantic}};
}

struct StepResult {
  State state;
  double reward = 0.0;
  bool done = false;
};

// Base environment. Subclasses implement the transition; the base owns the
// clock, the condition schedule, the reward and input validation.
class Env {
 public:
  virtual ~Env() = default;

  virtual EnvDescriptor descriptor() const = 0;
  virtual ConstraintLimits default_limits() const = 0;
  virtual Action initial_action() const {
    return Action::Zero(static_cast<Eigen::Index>(descriptor().action_dim));
  }
  virtual std::unique_ptr<Env> clone() const = 0;

  State reset(const ConditionSpec& condition, std::uint64_t seed) {
    condition.validate();
    condition_ = condition;
    t_ = 0.0;
    steps_ = 0;
    prev_action_ = initial_action();
    state_ = do_reset(seed);
    started_ = true;
    return state_;
  }

  StepResult step(const Action& a) {
    if (!started_) throw EnvError("env: step before reset");
    check_dim(static_cast<std::size_t>(a.size()), descriptor().action_dim,
              "env action");
    if (!a.allFinite()) throw EnvError("env: non-finite action");
    // past the end of a finite schedule the final value is held
    const double tc = std::min(t_, condition_.duration);
    const ConditionParams params = condition_.at(tc);
    State next = do_step(a, params);
    StepResult r;
    r.reward = evaluate_reward(reward_, next, a, prev_action_);
    r.done = !next.allFinite() || diverged(next);
    state_ = next;
    prev_action_ = a;
    ++steps_;
    t_ = static_cast<double>(steps_) * descriptor().dt;
    r.state = std::move(next);
    return r;
  }

  ConditionParams condition_at(double t) const { return condition_.at(t); }
  const ConditionSpec& condition() const { return condition_; }

  double time() const { return t_; }
  std::size_t steps() const { return steps_; }
  const State& state() const { return state_; }

  // Distance travelled along the task direction (0 if not meaningful).
  virtual double odometry() const { return 0.0; }

  void set_reward(const RewardSpec& r) {
    r.validate();
    reward_ = r;
  }
  const RewardSpec& reward() const { return reward_; }

 protected:
  virtual State do_reset(std::uint64_t seed) = 0;
  virtual State do_step(const Action& a, const ConditionParams& c) = 0;
  virtual bool diverged(const State& s) const = 0;

 private:
  ConditionSpec condition_;
  RewardSpec reward_;
  State state_;
  Action prev_action_;
  double t_ = 0.0;
  std::size_t steps_ = 0;
  bool started_ = false;
};

}  // namespace mbmrl

#endif  // MBMRL_ENVS_ENV_HPP_
