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

#ifndef MBMRL_MPC_REWARD_HPP_
#define MBMRL_MPC_REWARD_HPP_

#include <functional>
#include <string>

#include "json.hpp"
#include "mbmrl/common.hpp"

namespace mbmrl {

// Named reward with parameters. v_des may be changed between control steps.
//
//   velocity_tracking:  -w_v (v - v_des)^2 - w_u |a - a_prev|^2
//                       - w_p |a - posture|^2
//   state_regulation:   -w_v |s|^2
//   none:               0
//
// The state argument is the state reached after applying the action.
struct RewardSpec {
  std::string id = "velocity_tracking";
  double v_des = 0.5;
  double w_v = 1.0;
  double w_u = 0.01;
  double w_p = 0.0;
  std::size_t velocity_index = 0;
  Vector posture;  // empty: zero posture

  void validate() const {
    if (id != "velocity_tracking" && id != "state_regulation" && id != "none") {
      throw ConfigError(str_cat("reward: unknown id '", id, "'"));
    }
    if (!std::isfinite(v_des)) throw ConfigError("reward: v_des must be finite");
    if (w_v < 0.0 || w_u < 0.0 || w_p < 0.0) {
      throw ConfigError("reward: weights must be >= 0");
    }
  }
};

inline nlohmann::json reward_to_json(const RewardSpec& r) {
  nlohmann::json j = {{"id", r.id},   {"v_des", r.v_des}, {"w_v", r.w_v},
                      {"w_u", r.w_u}, {"w_p", r.w_p},
                      {"velocity_index", r.velocity_index}};
  if (r.posture.size() > 0) j["posture"] = to_std(r.posture);
  return j;
}

inline RewardSpec reward_from_json(const nlohmann::json& j) {
  RewardSpec r;
  try {
    r.id = j.value("id", r.id);
    r.v_des = j.value("v_des", r.v_des);
    r.w_v = j.value("w_v", r.w_v);
    r.w_u = j.value("w_u", r.w_u);
    r.w_p = j.value("w_p", r.w_p);
    r.velocity_index = j.value("velocity_index", r.velocity_index);
    if (j.contains("posture")) {
      r.posture = from_std(j.at("posture").get<std::vector<double>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(str_cat("reward: ", e.what()));
  }
  r.validate();
  return r;
}

inline double reward_velocity_tracking(const State& s, const Action& a,
                                       const Action& a_prev,
                                       const RewardSpec& p) {
  if (p.velocity_index >= static_cast<std::size_t>(s.size())) {
    throw DimensionError("reward: velocity index out of range");
  }
  const double ev = s[static_cast<Eigen::Index>(p.velocity_index)] - p.v_des;
  double r = -p.w_v * ev * ev;
  if (p.w_u > 0.0) r -= p.w_u * (a - a_prev).squaredNorm();
  if (p.w_p > 0.0) {
    r -= p.w_p * (p.posture.size() > 0 ? (a - p.posture).squaredNorm()
                                        : a.squaredNorm());
  }
  return r;
}

inline double evaluate_reward(const RewardSpec& p, const State& s,
                              const Action& a, const Action& a_prev) {
  if (p.id == "velocity_tracking") {
    return reward_velocity_tracking(s, a, a_prev, p);
  }
  if (p.id == "state_regulation") return -p.w_v * s.squaredNorm();
  return 0.0;
}

// Batched reward: columns of next_states/actions/prev_actions are samples.
using RewardFunction = std::function<Vector(
    const Matrix& next_states, const Matrix& actions, const Matrix& prev_actions)>;

inline RewardFunction make_reward(const RewardSpec& p) {
  p.validate();
  return [p](const Matrix& s, const Matrix& a, const Matrix& a_prev) -> Vector {
    const Eigen::Index n = s.cols();
    if (p.id == "none") return Vector::Zero(n);
    if (p.id == "state_regulation") {
      return -p.w_v * s.colwise().squaredNorm().transpose();
    }
    if (p.velocity_index >= static_cast<std::size_t>(s.rows())) {
      throw DimensionError("reward: velocity index out of range");
    }
    const auto vi = static_cast<Eigen::Index>(p.velocity_index);
    Vector r = -p.w_v * (s.row(vi).array() - p.v_des).square().matrix().transpose();
    if (p.w_u > 0.0) r -= p.w_u * (a - a_prev).colwise().squaredNorm().transpose();
    if (p.w_p > 0.0) {
      if (p.posture.size() > 0) {
        r -= p.w_p * (a.colwise() - p.posture).colwise().squaredNorm().transpose();
      } else {
        r -= p.w_p * a.colwise().squaredNorm().transpose();
      }
    }
    return r;
  };
}

}  // namespace mbmrl

#endif  // MBMRL_MPC_REWARD_HPP_
