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

#ifndef MBMRL_ENVS_FRICTION_CART_HPP_
#define MBMRL_ENVS_FRICTION_CART_HPP_

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include "json.hpp"
#include "mbmrl/envs/env.hpp"

namespace mbmrl {

// 1-D cart driven toward a commanded velocity a:
//
//   m dv/dt = g (a - v) - mu g0 tanh(v / w) - c v + F
//
// Integrated with a step that is implicit in v, so the stiff Coulomb term
// cannot chatter around v = 0. The state is [v]; position is integrated
// alongside and reported through odometry(), since the dynamics do not
// depend on it.
//
// Condition mapping:
//   friction mu            -> Coulomb scale
//   force F                -> additive force
//   fault channel blocked  -> command frozen at its value at fault onset
//   fault zero_torque      -> drive term removed
//   amputation             -> drive term removed
class FrictionCartEnv : public Env {
 public:
  struct Params {
    double mass = 1.0;
    double gain = 5.0;       // g
    double coulomb = 4.0;    // g0, multiplied by mu
    double viscous = 0.5;    // c
    double width = 1e-3;     // tanh regularization
    double command_min = -2.0;
    double command_max = 2.0;
    double v_max = 6.0;      // command rate limit, units/s
    double a_max = 60.0;     // units/s^2
    double j_max = 1500.0;   // units/s^3
    double dt = 0.02;
    double divergence = 10.0;
    double reset_noise = 0.0;

    void validate() const {
      if (!(mass > 0.0) || !(gain >= 0.0) || !(coulomb >= 0.0) ||
          !(viscous >= 0.0) || !(width > 0.0) || !(dt > 0.0) ||
          !(command_min < command_max) || !(divergence > 0.0)) {
        throw ConfigError("friction cart: invalid parameters");
      }
    }
  };

  FrictionCartEnv() : FrictionCartEnv(Params{}) {}
  explicit FrictionCartEnv(Params p) : p_(p) { p_.validate(); }

  const Params& params() const { return p_; }

  EnvDescriptor descriptor() const override {
    EnvDescriptor d;
    d.name = "friction_cart";
    d.state_dim = 1;
    d.action_dim = 1;
    d.dt = p_.dt;
    d.state_labels = {"v"};
    d.action_labels = {"v_cmd"};
    d.action_semantic = "desired velocity";
    return d;
  }

  ConstraintLimits default_limits() const override {
    return ConstraintLimits::uniform(1, p_.command_min, p_.command_max, p_.v_max,
                                     p_.a_max, p_.j_max, p_.dt);
  }

  std::unique_ptr<Env> clone() const override {
    return std::make_unique<FrictionCartEnv>(*this);
  }

  double odometry() const override { return x_; }

  // Friction force at velocity v; v * friction_force(v, mu) <= 0 always.
  double friction_force(double v, double mu) const {
    return -mu * p_.coulomb * std::tanh(v / p_.width) - p_.viscous * v;
  }

  // One implicit step from velocity v with effective command u (nullopt: no
  // drive) and external force F.
  double next_velocity(double v, std::optional<double> u, double mu,
                       double force) const {
    const double h = p_.dt / p_.mass;
    const double drive_gain = u ? p_.gain : 0.0;
    const double k = 1.0 + h * (drive_gain + p_.viscous);
    const double rhs = v + h * (drive_gain * u.value_or(0.0) + force);
    const double fc = h * mu * p_.coulomb;
    // g(v') = k v' + fc tanh(v'/w) - rhs is strictly increasing; the root is
    // bracketed by ignoring the bounded tanh term either way
    double lo = (rhs - fc) / k;
    double hi = (rhs + fc) / k;
    auto g = [&](double x) { return k * x + fc * std::tanh(x / p_.width) - rhs; };
    if (g(0.0) == 0.0 && lo <= 0.0 && hi >= 0.0) return 0.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (g(mid) > 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
  }

 protected:
  State do_reset(std::uint64_t seed) override {
    x_ = 0.0;
    frozen_.reset();
    applied_ = initial_action()[0];
    State s = State::Zero(1);
    if (p_.reset_noise > 0.0) {
      Rng rng(seed);
      std::normal_distribution<double> n(0.0, p_.reset_noise);
      s[0] = n(rng);
    }
    return s;
  }

  State do_step(const Action& a, const ConditionParams& c) override {
    double cmd = std::clamp(a[0], p_.command_min, p_.command_max);
    std::optional<double> drive = cmd;
    const bool faulted = c.fault_channel && *c.fault_channel == 0;
    if (faulted && c.fault_mode == FaultMode::kBlocked) {
      if (!frozen_) frozen_ = applied_;
      cmd = *frozen_;
      drive = cmd;
    } else {
      frozen_.reset();
    }
    if ((faulted && c.fault_mode == FaultMode::kZeroTorque) ||
        (c.disabled_channel && *c.disabled_channel == 0)) {
      drive.reset();
    }
    applied_ = cmd;
    const double force = c.force.empty() ? 0.0 : c.force[0];
    State next(1);
    next[0] = next_velocity(state()[0], drive, c.mu, force);
    x_ += next[0] * p_.dt;
    return next;
  }

  bool diverged(const State& s) const override {
    return std::abs(s[0]) > p_.divergence;
  }

 private:
  Params p_;
  double x_ = 0.0;
  double applied_ = 0.0;
  std::optional<double> frozen_;
};

inline nlohmann::json cart_params_to_json(const FrictionCartEnv::Params& p) {
  return {{"mass", p.mass},           {"gain", p.gain},
          {"coulomb", p.coulomb},     {"viscous", p.viscous},
          {"width", p.width},         {"command_min", p.command_min},
          {"command_max", p.command_max}, {"v_max", p.v_max},
          {"a_max", p.a_max},         {"j_max", p.j_max},
          {"dt", p.dt},               {"divergence", p.divergence},
          {"reset_noise", p.reset_noise}};
}

inline FrictionCartEnv::Params cart_params_from_json(const nlohmann::json& j) {
  FrictionCartEnv::Params p;
  p.mass = j.value("mass", p.mass);
  p.gain = j.value("gain", p.gain);
  p.coulomb = j.value("coulomb", p.coulomb);
  p.viscous = j.value("viscous", p.viscous);
  p.width = j.value("width", p.width);
  p.command_min = j.value("command_min", p.command_min);
  p.command_max = j.value("command_max", p.command_max);
  p.v_max = j.value("v_max", p.v_max);
  p.a_max = j.value("a_max", p.a_max);
  p.j_max = j.value("j_max", p.j_max);
  p.dt = j.value("dt", p.dt);
  p.divergence = j.value("divergence", p.divergence);
  p.reset_noise = j.value("reset_noise", p.reset_noise);
  p.validate();
  return p;
}

}  // namespace mbmrl

#endif  // MBMRL_ENVS_FRICTION_CART_HPP_
