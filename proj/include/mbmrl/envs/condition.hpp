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

#ifndef MBMRL_ENVS_CONDITION_HPP_
#define MBMRL_ENVS_CONDITION_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mbmrl/common.hpp"

namespace mbmrl {

inline constexpr double kDefaultFriction = 0.8;
inline constexpr double kMinFriction = 0.05;
inline constexpr double kMaxFriction = 1.0;

enum class FaultMode { kBlocked, kZeroTorque };

// Condition in effect at one instant. Fields compose: a slippery floor with
// a push is mu=0.2 plus a non-empty force.
struct ConditionParams {
  double mu = kDefaultFriction;
  std::vector<double> force;              // additive external force; empty: none
  std::optional<std::size_t> fault_channel;
  FaultMode fault_mode = FaultMode::kBlocked;
  std::optional<std::size_t> disabled_channel;  // amputation analog
  double parameter = 1.0;                 // input gain p of the linear env

  void validate() const {
    if (!(mu >= kMinFriction && mu <= kMaxFriction)) {
      throw ConfigError(str_cat("condition: friction ", mu, " outside [",
                                kMinFriction, ", ", kMaxFriction, "]"));
    }
    for (double f : force) {
      if (!std::isfinite(f)) throw ConfigError("condition: non-finite force");
    }
    if (!std::isfinite(parameter)) {
      throw ConfigError("condition: non-finite parameter");
    }
  }

  friend bool operator==(const ConditionParams&, const ConditionParams&) = default;
};

inline std::string to_string(FaultMode m) {
  return m == FaultMode::kBlocked ? "blocked" : "zero_torque";
}

inline FaultMode fault_mode_from_string(const std::string& s) {
  if (s == "blocked") return FaultMode::kBlocked;
  if (s == "zero_torque" || s == "zero-torque") return FaultMode::kZeroTorque;
  throw ConfigError(str_cat("unknown fault mode '", s, "'"));
}

inline nlohmann::json params_to_json(const ConditionParams& c) {
  nlohmann::json j = {{"mu", c.mu}, {"parameter", c.parameter}};
  if (!c.force.empty()) j["force"] = c.force;
  if (c.fault_channel) {
    j["fault"] = {{"channel", *c.fault_channel}, {"mode", to_string(c.fault_mode)}};
  }
  if (c.disabled_channel) j["disabled_channel"] = *c.disabled_channel;
  return j;
}

inline ConditionParams params_from_json(const nlohmann::json& j) {
  ConditionParams c;
  c.mu = j.value("mu", c.mu);
  c.parameter = j.value("parameter", c.parameter);
  if (j.contains("force")) c.force = j.at("force").get<std::vector<double>>();
  if (j.contains("fault")) {
    c.fault_channel = j.at("fault").at("channel").get<std::size_t>();
    c.fault_mode = fault_mode_from_string(j.at("fault").value("mode", "blocked"));
  }
  if (j.contains("disabled_channel")) {
    c.disabled_channel = j.at("disabled_channel").get<std::size_t>();
  }
  return c;
}

// Condition schedule over an episode [0, duration].
struct ConditionSpec {
  enum class Schedule { kConstant, kPiecewise, kRamp };

  Schedule schedule = Schedule::kConstant;
  ConditionParams base;  // constant value; ramp template
  std::vector<std::pair<double, ConditionParams>> phases;  // start time, value
  double mu_start = kDefaultFriction;
  double mu_end = kDefaultFriction;
  double duration = kInf;
  std::string label;  // free-form tag override

  static ConditionSpec constant(ConditionParams p) {
    ConditionSpec c;
    c.base = std::move(p);
    return c;
  }

  static ConditionSpec friction(double mu) {
    ConditionParams p;
    p.mu = mu;
    return constant(p);
  }

  static ConditionSpec ramp(double mu0, double mu1, double duration,
                            ConditionParams base = {}) {
    ConditionSpec c;
    c.schedule = Schedule::kRamp;
    c.base = std::move(base);
    c.mu_start = mu0;
    c.mu_end = mu1;
    c.duration = duration;
    return c;
  }

  static ConditionSpec piecewise(
      std::vector<std::pair<double, ConditionParams>> phases, double duration) {
    ConditionSpec c;
    c.schedule = Schedule::kPiecewise;
    c.phases = std::move(phases);
    c.duration = duration;
    return c;
  }

  void validate() const {
    if (!(duration > 0.0)) throw ConfigError("condition: duration must be > 0");
    switch (schedule) {
      case Schedule::kConstant:
        base.validate();
        break;
      case Schedule::kRamp: {
        if (std::isinf(duration)) {
          throw ConfigError("condition: ramp needs a finite duration");
        }
        ConditionParams a = base, b = base;
        a.mu = mu_start;
        b.mu = mu_end;
        a.validate();
        b.validate();
        break;
      }
      case Schedule::kPiecewise:
        if (phases.empty() || phases.front().first != 0.0) {
          throw ConfigError("condition: piecewise schedule must start at t=0");
        }
        for (std::size_t i = 0; i < phases.size(); ++i) {
          if (i > 0 && !(phases[i].first > phases[i - 1].first)) {
            throw ConfigError("condition: phase start times must increase");
          }
          phases[i].second.validate();
        }
        break;
    }
  }

  ConditionParams at(double t) const {
    // small slack so t = duration computed as k*dt still resolves
    if (!(t >= 0.0) || t > duration * (1.0 + 1e-12) + 1e-12) {
      throw ConfigError(str_cat("condition: time ", t, " outside [0, ",
                                duration, "]"));
    }
    switch (schedule) {
      case Schedule::kConstant:
        return base;
      case Schedule::kRamp: {
        ConditionParams p = base;
        const double s = std::min(t / duration, 1.0);
        p.mu = mu_start + (mu_end - mu_start) * s;
        return p;
      }
      case Schedule::kPiecewise: {
        std::size_t k = 0;
        while (k + 1 < phases.size() && t >= phases[k + 1].first) ++k;
        return phases[k].second;
      }
    }
    return base;
  }

  // Short identifier used to tag datasets and metrics rows.
  std::string tag() const {
    if (!label.empty()) return label;
    auto describe = [](const ConditionParams& p) {
      std::string s = str_cat("mu=", p.mu);
      if (!p.force.empty()) s += str_cat(",force=", p.force[0]);
      if (p.fault_channel) {
        s += str_cat(",fault=", *p.fault_channel, ":", to_string(p.fault_mode));
      }
      if (p.disabled_channel) s += str_cat(",amputation=", *p.disabled_channel);
      if (p.parameter != 1.0) s += str_cat(",p=", p.parameter);
      return s;
    };
    switch (schedule) {
      case Schedule::kConstant:
        return describe(base);
      case Schedule::kRamp:
        return str_cat("ramp(mu=", mu_start, "->", mu_end, ")");
      case Schedule::kPiecewise:
        return str_cat("piecewise(", phases.size(), " phases)");
    }
    return "?";
  }
};

inline nlohmann::json condition_to_json(const ConditionSpec& c) {
  nlohmann::json j;
  switch (c.schedule) {
    case ConditionSpec::Schedule::kConstant:
      j = {{"schedule", "constant"}, {"params", params_to_json(c.base)}};
      break;
    case ConditionSpec::Schedule::kRamp:
      j = {{"schedule", "ramp"},       {"params", params_to_json(c.base)},
           {"mu_start", c.mu_start},   {"mu_end", c.mu_end},
           {"duration", c.duration}};
      break;
    case ConditionSpec::Schedule::kPiecewise: {
      nlohmann::json ph = nlohmann::json::array();
      for (const auto& [t, p] : c.phases) {
        ph.push_back({{"start", t}, {"params", params_to_json(p)}});
      }
      j = {{"schedule", "piecewise"}, {"phases", ph}, {"duration", c.duration}};
      break;
    }
  }
  if (!c.label.empty()) j["label"] = c.label;
  return j;
}

inline ConditionSpec condition_from_json(const nlohmann::json& j) {
  ConditionSpec c;
  try {
    const std::string sched = j.value("schedule", "constant");
    if (sched == "constant") {
      c.base = params_from_json(j.value("params", nlohmann::json::object()));
    } else if (sched == "ramp") {
      c.schedule = ConditionSpec::Schedule::kRamp;
      c.base = params_from_json(j.value("params", nlohmann::json::object()));
      c.mu_start = j.at("mu_start").get<double>();
      c.mu_end = j.at("mu_end").get<double>();
      c.duration = j.at("duration").get<double>();
    } else if (sched == "piecewise") {
      c.schedule = ConditionSpec::Schedule::kPiecewise;
      for (const auto& ph : j.at("phases")) {
        c.phases.emplace_back(ph.at("start").get<double>(),
                              params_from_json(ph.at("params")));
      }
      c.duration = j.at("duration").get<double>();
    } else {
      throw ConfigError(str_cat("condition: unknown schedule '", sched, "'"));
    }
    if (j.contains("duration") && c.schedule == ConditionSpec::Schedule::kConstant &&
        !j.at("duration").is_null()) {
      c.duration = j.at("duration").get<double>();
    }
    c.label = j.value("label", "");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(str_cat("condition: ", e.what()));
  }
  c.validate();
  return c;
}

namespace internal {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(str_cat("condition: bad number '", s, "'"));
  }
}

}  // namespace internal

// Parses either a JSON object or the short form used on the command line:
//   default | friction=0.3 | force=2.5 | fault=0:blocked | amputation=0 |
//   param=0.4 | ramp=0.8:0.1:10
// Terms can be joined with ',' (e.g. "friction=0.2,force=1.5").
inline ConditionSpec parse_condition(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return condition_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(str_cat("condition: ", e.what()));
    }
  }
  ConditionSpec c;
  for (const std::string& term : internal::split(text, ',')) {
    if (term.empty() || term == "default") continue;
    const auto eq = term.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(str_cat("condition: cannot parse '", term, "'"));
    }
    const std::string key = term.substr(0, eq);
    const std::string val = term.substr(eq + 1);
    if (key == "friction" || key == "mu") {
      c.base.mu = internal::parse_double(val);
    } else if (key == "force") {
      c.base.force = {internal::parse_double(val)};
    } else if (key == "fault") {
      const auto parts = internal::split(val, ':');
      c.base.fault_channel = static_cast<std::size_t>(internal::parse_double(parts[0]));
      c.base.fault_mode =
          fault_mode_from_string(parts.size() > 1 ? parts[1] : "blocked");
    } else if (key == "amputation") {
      c.base.disabled_channel = static_cast<std::size_t>(internal::parse_double(val));
    } else if (key == "param") {
      c.base.parameter = internal::parse_double(val);
    } else if (key == "ramp") {
      const auto parts = internal::split(val, ':');
      if (parts.size() != 3) {
        throw ConfigError("condition: ramp needs mu_start:mu_end:duration");
      }
      c.schedule = ConditionSpec::Schedule::kRamp;
      c.mu_start = internal::parse_double(parts[0]);
      c.mu_end = internal::parse_double(parts[1]);
      c.duration = internal::parse_double(parts[2]);
    } else {
      throw ConfigError(str_cat("condition: unknown key '", key, "'"));
    }
  }
  c.validate();
  return c;
}

}  // namespace mbmrl

#endif  // MBMRL_ENVS_CONDITION_HPP_
