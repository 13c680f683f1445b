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

#ifndef MBMRL_ENVS_LINEAR_ENV_HPP_
#define MBMRL_ENVS_LINEAR_ENV_HPP_

#include <memory>

#include "mbmrl/envs/env.hpp"

namespace mbmrl {

// s' = A s + p B a + f, with p the condition parameter. Exactly solvable;
// used as a ground truth for model and meta-learning tests.
class LinearParamEnv : public Env {
 public:
  struct Params {
    Matrix A;
    Matrix B;
    Vector f;
    double dt = 0.02;
    double divergence = 1e3;
    double reset_noise = 0.0;  // std of a seeded perturbation of s0
  };

  static Params default_params() {
    Params p;
    p.A.resize(2, 2);
    p.A << 0.9, 0.05, -0.05, 0.85;
    p.B.resize(2, 1);
    p.B << 0.1, 0.5;
    p.f.resize(2);
    p.f << 0.01, -0.02;
    return p;
  }

  LinearParamEnv() : LinearParamEnv(default_params()) {}
  explicit LinearParamEnv(Params p) : p_(std::move(p)) {
    const auto n = p_.A.rows();
    if (n == 0 || p_.A.cols() != n || p_.B.rows() != n || p_.f.size() != n ||
        p_.B.cols() == 0) {
      throw ConfigError("linear env: inconsistent A/B/f shapes");
    }
    const double rho = p_.A.eigenvalues().cwiseAbs().maxCoeff();
    if (!(rho < 1.0)) {
      throw ConfigError(str_cat("linear env: spectral radius ", rho, " >= 1"));
    }
  }

  const Params& params() const { return p_; }

  EnvDescriptor descriptor() const override {
    EnvDescriptor d;
    d.name = "linear";
    d.state_dim = static_cast<std::size_t>(p_.A.rows());
    d.action_dim = static_cast<std::size_t>(p_.B.cols());
    d.dt = p_.dt;
    for (std::size_t i = 0; i < d.state_dim; ++i) {
      d.state_labels.push_back(str_cat("s", i));
    }
    for (std::size_t i = 0; i < d.action_dim; ++i) {
      d.action_labels.push_back(str_cat("u", i));
    }
    d.action_semantic = "input";
    return d;
  }

  ConstraintLimits default_limits() const override {
    return ConstraintLimits::uniform(static_cast<std::size_t>(p_.B.cols()),
                                     -1.0, 1.0, kInf, kInf, kInf, p_.dt);
  }

  std::unique_ptr<Env> clone() const override {
    return std::make_unique<LinearParamEnv>(*this);
  }

  // Exact transition, exposed for oracle tests.
  State transition(const State& s, const Action& a, double parameter) const {
    return p_.A * s + parameter * (p_.B * a) + p_.f;
  }

 protected:
  State do_reset(std::uint64_t seed) override {
    State s = State::Zero(p_.A.rows());
    if (p_.reset_noise > 0.0) {
      Rng rng(seed);
      std::normal_distribution<double> n(0.0, p_.reset_noise);
      for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = n(rng);
    }
    return s;
  }

  State do_step(const Action& a, const ConditionParams& c) override {
    Action u = a;
    if (c.disabled_channel && *c.disabled_channel < static_cast<std::size_t>(u.size())) {
      u[static_cast<Eigen::Index>(*c.disabled_channel)] = 0.0;
    }
    State next = transition(state(), u, c.parameter);
    for (std::size_t i = 0; i < c.force.size() && i < static_cast<std::size_t>(next.size()); ++i) {
      next[static_cast<Eigen::Index>(i)] += c.force[i] * p_.dt;
    }
    return next;
  }

  bool diverged(const State& s) const override {
    return s.cwiseAbs().maxCoeff() > p_.divergence;
  }

 private:
  Params p_;
};

}  // namespace mbmrl

#endif  // MBMRL_ENVS_LINEAR_ENV_HPP_
