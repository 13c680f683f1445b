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

#ifndef MBMRL_NN_ADAM_HPP_
#define MBMRL_NN_ADAM_HPP_

#include <cmath>
#include <cstdint>

#include "mbmrl/common.hpp"

namespace mbmrl::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw ConfigError("adam: learning rate must be finite and >= 0");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw ConfigError("adam: betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be > 0");
  }
};

// Moment accumulators for one parameter vector.
struct AdamState {
  AdamConfig config;
  Vector m;
  Vector v;
  std::int64_t t = 0;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg)
      : config(cfg),
        m(Vector::Zero(static_cast<Eigen::Index>(n))),
        v(Vector::Zero(static_cast<Eigen::Index>(n))) {
    config.validate();
  }
};

// One bias-corrected Adam update of params in place.
inline void adam_step(Vector& params, AdamState& st, const Vector& grad) {
  check_dim(static_cast<std::size_t>(grad.size()),
            static_cast<std::size_t>(params.size()), "adam gradient");
  check_dim(static_cast<std::size_t>(st.m.size()),
            static_cast<std::size_t>(params.size()), "adam state");
  if (!grad.allFinite()) throw TrainingError("adam: non-finite gradient");

  const AdamConfig& c = st.config;
  st.t += 1;
  st.m = c.beta1 * st.m + (1.0 - c.beta1) * grad;
  st.v = c.beta2 * st.v + (1.0 - c.beta2) * grad.cwiseAbs2();
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(st.t));
  params.array() -= c.learning_rate * (st.m.array() / bc1) /
                    ((st.v.array() / bc2).sqrt() + c.epsilon);
}

}  // namespace mbmrl::nn

#endif  // MBMRL_NN_ADAM_HPP_
