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

#ifndef MBMRL_ENVS_REGISTRY_HPP_
#define MBMRL_ENVS_REGISTRY_HPP_

#include <memory>
#include <string>

#include "json.hpp"
#include "mbmrl/envs/friction_cart.hpp"
#include "mbmrl/envs/linear_env.hpp"

namespace mbmrl {

// Builds a built-in environment by name ("linear" or "friction_cart").
inline std::unique_ptr<Env> make_env(
    const std::string& name,
    const nlohmann::json& params = nlohmann::json::object()) {
  try {
    if (name == "friction_cart") {
      return std::make_unique<FrictionCartEnv>(cart_params_from_json(params));
    }
    if (name == "linear") {
      LinearParamEnv::Params p = LinearParamEnv::default_params();
      if (params.contains("A")) {
        const auto rows = params.at("A").get<std::vector<std::vector<double>>>();
        p.A.resize(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          for (std::size_t c = 0; c < rows[r].size(); ++c) {
            p.A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
          }
        }
      }
      if (params.contains("B")) {
        const auto rows = params.at("B").get<std::vector<std::vector<double>>>();
        p.B.resize(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          for (std::size_t c = 0; c < rows[r].size(); ++c) {
            p.B(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
          }
        }
      }
      if (params.contains("f")) p.f = from_std(params.at("f").get<std::vector<double>>());
      p.dt = params.value("dt", p.dt);
      p.divergence = params.value("divergence", p.divergence);
      p.reset_noise = params.value("reset_noise", p.reset_noise);
      return std::make_unique<LinearParamEnv>(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(str_cat("env params: ", e.what()));
  }
  throw ConfigError(str_cat("unknown env '", name, "'"));
}

}  // namespace mbmrl

#endif  // MBMRL_ENVS_REGISTRY_HPP_
