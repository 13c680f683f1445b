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

#ifndef MBMRL_MPC_EPISODE_HPP_
#define MBMRL_MPC_EPISODE_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbmrl/dynamics/dataset.hpp"
#include "mbmrl/envs/env.hpp"
#include "mbmrl/mpc/planner.hpp"

namespace mbmrl {

// Desired-velocity command over time.
//   constant:  v0
//   ramp:      v0 -> v1 linearly over [0, duration], then held
//   piecewise: a new value uniform in [lo, hi] every `period` seconds,
//              drawn from `seed`; the first segment uses v0
struct VdesSchedule {
  enum class Kind { kConstant, kRamp, kPiecewise };
  Kind kind = Kind::kConstant;
  double v0 = 0.5;
  double v1 = 0.5;
  double duration = 1.0;
  double period = 2.0;
  double lo = -0.2;
  double hi = 0.5;
  std::uint64_t seed = 0;

  static VdesSchedule constant(double v) {
    VdesSchedule s;
    s.v0 = s.v1 = v;
    return s;
  }
  static VdesSchedule ramp(double v0, double v1, double duration) {
    VdesSchedule s;
    s.kind = Kind::kRamp;
    s.v0 = v0;
    s.v1 = v1;
    s.duration = duration;
    return s;
  }
  static VdesSchedule piecewise(double v0, double lo, double hi, double period,
                                std::uint64_t seed) {
    VdesSchedule s;
    s.kind = Kind::kPiecewise;
    s.v0 = v0;
    s.lo = lo;
    s.hi = hi;
    s.period = period;
    s.seed = seed;
    return s;
  }

  void validate() const {
    if (!std::isfinite(v0) || !std::isfinite(v1)) {
      throw ConfigError("v_des schedule: values must be finite");
    }
    if (kind == Kind::kRamp && !(duration > 0.0)) {
      throw ConfigError("v_des schedule: ramp duration must be > 0");
    }
    if (kind == Kind::kPiecewise && (!(period > 0.0) || !(lo <= hi))) {
      throw ConfigError("v_des schedule: need period > 0 and lo <= hi");
    }
  }

  double at(double t) const {
    switch (kind) {
      case Kind::kConstant:
        return v0;
      case Kind::kRamp:
        return t >= duration ? v1 : v0 + (v1 - v0) * (t / duration);
      case Kind::kPiecewise: {
        const auto seg = static_cast<std::uint64_t>(std::floor(t / period + 1e-9));
        if (seg == 0) return v0;
        Rng rng(derive_seed(seed, seg));
        return lo + (hi - lo) * uniform01(rng);
      }
    }
    return v0;
  }
};

inline nlohmann::json vdes_to_json(const VdesSchedule& s) {
  switch (s.kind) {
    case VdesSchedule::Kind::kConstant:
      return {{"kind", "constant"}, {"v0", s.v0}};
    case VdesSchedule::Kind::kRamp:
      return {{"kind", "ramp"}, {"v0", s.v0}, {"v1", s.v1}, {"duration", s.duration}};
    case VdesSchedule::Kind::kPiecewise:
      return {{"kind", "piecewise"}, {"v0", s.v0},         {"lo", s.lo},
              {"hi", s.hi},          {"period", s.period}, {"seed", s.seed}};
  }
  return {};
}

inline VdesSchedule vdes_from_json(const nlohmann::json& j) {
  VdesSchedule s;
  const std::string kind = j.value("kind", "constant");
  s.v0 = j.value("v0", s.v0);
  if (kind == "constant") {
    s.v1 = s.v0;
  } else if (kind == "ramp") {
    s.kind = VdesSchedule::Kind::kRamp;
    s.v1 = j.at("v1").get<double>();
    s.duration = j.at("duration").get<double>();
  } else if (kind == "piecewise") {
    s.kind = VdesSchedule::Kind::kPiecewise;
    s.lo = j.value("lo", s.lo);
    s.hi = j.value("hi", s.hi);
    s.period = j.value("period", s.period);
    s.seed = j.value("seed", s.seed);
  } else {
    throw ConfigError(str_cat("v_des schedule: unknown kind '", kind, "'"));
  }
  s.validate();
  return s;
}

// Supplies the model used for planning at each control step. Experts return
// a fixed model; meta adapters select a condition and fine-tune.
class ModelProvider {
 public:
  struct Choice {
    const DynamicsModel* model = nullptr;
    Vector latent;
    int condition_idx = -1;
    Vector condition_losses;
  };

  virtual ~ModelProvider() = default;
  virtual void begin_episode() {}
  virtual Choice choose() = 0;
  virtual void observe(const State& s, const Action& a, const State& s_next) {
    (void)s;
    (void)a;
    (void)s_next;
  }
  virtual std::size_t num_conditions() const { return 0; }
};

class FixedModel : public ModelProvider {
 public:
  explicit FixedModel(const DynamicsModel& m, Vector latent = Vector())
      : m_(m), latent_(std::move(latent)) {}
  Choice choose() override { return {&m_, latent_, -1, Vector()}; }

 private:
  const DynamicsModel& m_;
  Vector latent_;
};

struct EpisodeConfig {
  std::size_t steps = 500;  // 10 s at 50 Hz
  MpcConfig mpc;
  ConstraintLimits limits;
  RewardSpec reward;
  VdesSchedule v_des = VdesSchedule::constant(0.5);
  std::uint64_t seed = 0;
};

struct StepLog {
  double time = 0.0;  // time at which the action was chosen
  State state;        // state after the step
  Action action;
  double reward = 0.0;
  double v_des = 0.0;
  PlanDiagnostics diag;
  int condition_idx = -1;
  Vector condition_losses;
  double odometry = 0.0;
};

struct EpisodeLog {
  EnvDescriptor env;
  std::string condition_tag;
  State initial_state;
  Action initial_action;
  std::vector<StepLog> steps;
  bool terminated_early = false;
  std::size_t num_conditions = 0;
  nlohmann::json header = nlohmann::json::object();

  double total_reward() const {
    double r = 0.0;
    for (const auto& s : steps) r += s.reward;
    return r;
  }

  // |v - v_des| averaged over steps whose time is >= from_time.
  double mean_tracking_error(std::size_t velocity_index = 0,
                             double from_time = 0.0) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : steps) {
      if (s.time + 1e-12 < from_time) continue;
      sum += std::abs(s.state[static_cast<Eigen::Index>(velocity_index)] - s.v_des);
      ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
  }

  // Executed-command jerk by backward differences, the warm-up history
  // included; one value per step per action dimension.
  std::vector<double> executed_jerk(double dt) const {
    std::vector<double> out;
    if (steps.empty()) return out;
    const Eigen::Index dims = initial_action.size();
    for (Eigen::Index d = 0; d < dims; ++d) {
      std::vector<double> x = {initial_action[d], initial_action[d], initial_action[d]};
      for (const auto& s : steps) x.push_back(s.action[d]);
      for (std::size_t k = 3; k < x.size(); ++k) {
        out.push_back((x[k] - 3.0 * x[k - 1] + 3.0 * x[k - 2] - x[k - 3]) /
                      (dt * dt * dt));
      }
    }
    return out;
  }

  double mean_abs_jerk(double dt) const {
    const auto j = executed_jerk(dt);
    if (j.empty()) return 0.0;
    double s = 0.0;
    for (double v : j) s += std::abs(v);
    return s / static_cast<double>(j.size());
  }

  Matrix action_matrix() const {
    Matrix a(initial_action.size(), static_cast<Eigen::Index>(steps.size()));
    for (std::size_t t = 0; t < steps.size(); ++t) {
      a.col(static_cast<Eigen::Index>(t)) = steps[t].action;
    }
    return a;
  }
};

// Closed-loop MPC episode. T = 0 yields a log holding only the initial state.
inline EpisodeLog run_episode(Env& env, const ConditionSpec& condition,
                              ModelProvider& provider, const EpisodeConfig& cfg) {
  cfg.mpc.validate();
  cfg.limits.validate();
  cfg.v_des.validate();
  const EnvDescriptor desc = env.descriptor();
  check_dim(cfg.limits.dims(), desc.action_dim, "episode limits");

  EpisodeLog log;
  log.env = desc;
  log.condition_tag = condition.tag();
  log.num_conditions = provider.num_conditions();
  RewardSpec reward = cfg.reward;
  reward.v_des = cfg.v_des.at(0.0);
  env.set_reward(reward);
  State s = env.reset(condition, derive_seed(cfg.seed, ~std::uint64_t{0}));
  log.initial_state = s;
  log.initial_action = env.initial_action();
  ActionHistory hist = ActionHistory::constant(log.initial_action);
  provider.begin_episode();

  for (std::size_t t = 0; t < cfg.steps; ++t) {
    const double time = env.time();
    reward.v_des = cfg.v_des.at(time);
    env.set_reward(reward);
    ModelProvider::Choice choice = provider.choose();
    PlanResult pr = plan(*choice.model, s, hist, cfg.mpc, cfg.limits,
                         make_reward(reward), choice.latent,
                         derive_seed(cfg.seed, t));
    StepResult r = env.step(pr.action);
    provider.observe(s, pr.action, r.state);
    hist.push(pr.action);

    StepLog sl;
    sl.time = time;
    sl.state = r.state;
    sl.action = pr.action;
    sl.reward = r.reward;
    sl.v_des = reward.v_des;
    sl.diag = pr.diag;
    sl.condition_idx = choice.condition_idx;
    sl.condition_losses = std::move(choice.condition_losses);
    sl.odometry = env.odometry();
    log.steps.push_back(std::move(sl));
    s = std::move(r.state);
    if (r.done) {
      log.terminated_early = t + 1 < cfg.steps;
      break;
    }
  }
  return log;
}

inline std::string episode_csv_header(const EpisodeLog& log) {
  std::string h = "step,time";
  for (std::size_t i = 0; i < log.env.state_dim; ++i) h += str_cat(",s_", i);
  for (std::size_t i = 0; i < log.env.action_dim; ++i) h += str_cat(",a_", i);
  h += ",reward,v_des,odometry,ret_best,ret_mean,ret_worst,argmax,condition_idx";
  for (std::size_t i = 0; i < log.num_conditions; ++i) h += str_cat(",loss_", i);
  return h;
}

// Deterministic CSV body; the JSON header carries metadata.
inline void write_episode_csv(std::ostream& out, const EpisodeLog& log) {
  using internal::fmt_double;
  out << episode_csv_header(log) << "\n";
  for (std::size_t t = 0; t < log.steps.size(); ++t) {
    const StepLog& s = log.steps[t];
    out << t << "," << fmt_double(s.time);
    for (Eigen::Index i = 0; i < s.state.size(); ++i) out << "," << fmt_double(s.state[i]);
    for (Eigen::Index i = 0; i < s.action.size(); ++i) out << "," << fmt_double(s.action[i]);
    out << "," << fmt_double(s.reward) << "," << fmt_double(s.v_des) << ","
        << fmt_double(s.odometry) << "," << fmt_double(s.diag.best) << ","
        << fmt_double(s.diag.mean) << "," << fmt_double(s.diag.worst) << ","
        << s.diag.argmax << "," << s.condition_idx;
    for (std::size_t i = 0; i < log.num_conditions; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      out << "," << (k < s.condition_losses.size() ? fmt_double(s.condition_losses[k]) : "");
    }
    out << "\n";
  }
}

inline void save_episode(const std::filesystem::path& stem, const EpisodeLog& log) {
  std::filesystem::path csv = stem;
  csv += ".csv";
  std::filesystem::path meta = stem;
  meta += ".json";
  {
    std::ofstream out(csv, std::ios::trunc);
    if (!out) throw IoError(str_cat("cannot open ", csv.string()));
    write_episode_csv(out, log);
  }
  nlohmann::json j = log.header;
  j["env"] = descriptor_to_json(log.env);
  j["condition"] = log.condition_tag;
  j["num_steps"] = log.steps.size();
  j["terminated_early"] = log.terminated_early;
  j["initial_state"] = to_std(log.initial_state);
  j["initial_action"] = to_std(log.initial_action);
  j["num_conditions"] = log.num_conditions;
  j["log_file"] = csv.filename().string();
  j["created_at"] = nn::utc_timestamp();
  std::ofstream mo(meta, std::ios::trunc);
  if (!mo) throw IoError(str_cat("cannot open ", meta.string()));
  mo << j.dump(2) << "\n";
}

}  // namespace mbmrl

#endif  // MBMRL_MPC_EPISODE_HPP_
