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

#ifndef MBMRL_SAMPLER_LIMITS_HPP_
#define MBMRL_SAMPLER_LIMITS_HPP_

#include <array>
#include <cmath>

#include "json.hpp"
#include "mbmrl/common.hpp"

namespace mbmrl {

// Per-action-dimension bounds on the commanded signal q and on its backward
// finite-difference velocity, acceleration and jerk at period dt.
struct ConstraintLimits {
  Vector q_min;
  Vector q_max;
  Vector v_max;
  Vector a_max;
  Vector j_max;
  double dt = 0.02;  // 50 Hz

  static ConstraintLimits uniform(std::size_t dims, double q_lo, double q_hi,
                                  double v, double a, double j, double dt) {
    const auto n = static_cast<Eigen::Index>(dims);
    ConstraintLimits lim;
    lim.q_min = Vector::Constant(n, q_lo);
    lim.q_max = Vector::Constant(n, q_hi);
    lim.v_max = Vector::Constant(n, v);
    lim.a_max = Vector::Constant(n, a);
    lim.j_max = Vector::Constant(n, j);
    lim.dt = dt;
    return lim;
  }

  std::size_t dims() const { return static_cast<std::size_t>(q_min.size()); }

  // V, A, J may be zero (frozen command) or +inf (unconstrained).
  void validate() const {
    const std::size_t n = dims();
    if (n == 0) throw ConfigError("limits: no action dimensions");
    check_dim(static_cast<std::size_t>(q_max.size()), n, "limits q_max");
    check_dim(static_cast<std::size_t>(v_max.size()), n, "limits v_max");
    check_dim(static_cast<std::size_t>(a_max.size()), n, "limits a_max");
    check_dim(static_cast<std::size_t>(j_max.size()), n, "limits j_max");
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw ConfigError("limits: dt must be finite and > 0");
    }
    for (std::size_t d = 0; d < n; ++d) {
      const auto i = static_cast<Eigen::Index>(d);
      if (!std::isfinite(q_min[i]) || !std::isfinite(q_max[i]) ||
          !(q_min[i] < q_max[i])) {
        throw ConfigError(str_cat("limits: need finite q_min < q_max (dim ",
                                  d, ")"));
      }
      if (!(v_max[i] >= 0.0) || !(a_max[i] >= 0.0) || !(j_max[i] >= 0.0)) {
        throw ConfigError(str_cat("limits: V/A/J must be >= 0 (dim ", d, ")"));
      }
    }
  }
};

// unbounded limits are written as null
inline nlohmann::json limits_to_json(const ConstraintLimits& lim) {
  auto arr = [](const Vector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::isinf(v[i])) {
        a.push_back(nullptr);
      } else {
        a.push_back(v[i]);
      }
    }
    return a;
  };
  return {{"q_min", arr(lim.q_min)}, {"q_max", arr(lim.q_max)},
          {"v_max", arr(lim.v_max)}, {"a_max", arr(lim.a_max)},
          {"j_max", arr(lim.j_max)}, {"dt", lim.dt}};
}

inline ConstraintLimits limits_from_json(const nlohmann::json& j,
                                         double default_dt) {
  auto arr = [&](const char* key) {
    const nlohmann::json& a = j.at(key);
    if (!a.is_array()) throw ConfigError(str_cat("limits: ", key, " must be an array"));
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] =
          a[i].is_null() ? kInf : a[i].get<double>();
    }
    return v;
  };
  ConstraintLimits lim;
  try {
    lim.q_min = arr("q_min");
    lim.q_max = arr("q_max");
    lim.v_max = arr("v_max");
    lim.a_max = arr("a_max");
    lim.j_max = arr("j_max");
    lim.dt = j.value("dt", default_dt);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(str_cat("limits: ", e.what()));
  }
  lim.validate();
  return lim;
}

// The three most recently executed actions, oldest first.
struct ActionHistory {
  std::array<Action, 3> recent;

  // warm-up: three copies of the initial posture
  static ActionHistory constant(const Action& a0) { return {{a0, a0, a0}}; }

  const Action& last() const { return recent[2]; }
  const Action& second_last() const { return recent[1]; }
  const Action& third_last() const { return recent[0]; }
  std::size_t dims() const { return static_cast<std::size_t>(recent[2].size()); }

  void push(const Action& a) {
    recent[0] = std::move(recent[1]);
    recent[1] = std::move(recent[2]);
    recent[2] = a;
  }
};

}  // namespace mbmrl

#endif  // MBMRL_SAMPLER_LIMITS_HPP_
