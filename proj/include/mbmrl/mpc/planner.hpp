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

#ifndef MBMRL_MPC_PLANNER_HPP_
#define MBMRL_MPC_PLANNER_HPP_

#include <span>

#include "json.hpp"
#include "mbmrl/dynamics/model.hpp"
#include "mbmrl/mpc/reward.hpp"
#include "mbmrl/sampler/sampler.hpp"

namespace mbmrl {

struct MpcConfig {
  std::size_t horizon = 20;
  std::size_t population = 1000;
  double gamma = 0.99;
  SamplingMode sampling = SamplingMode::kConstrained;

  void validate() const {
    if (horizon < 1) throw ConfigError("mpc: horizon must be >= 1");
    if (population < 1) throw ConfigError("mpc: population must be >= 1");
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
      throw ConfigError("mpc: gamma must lie in [0, 1]");
    }
  }
};

inline nlohmann::json mpc_config_to_json(const MpcConfig& c) {
  return {{"horizon", c.horizon},
          {"population", c.population},
          {"gamma", c.gamma},
          {"sampling", to_string(c.sampling)}};
}

inline MpcConfig mpc_config_from_json(const nlohmann::json& j) {
  MpcConfig c;
  c.horizon = j.value("horizon", c.horizon);
  c.population = j.value("population", c.population);
  c.gamma = j.value("gamma", c.gamma);
  c.sampling = sampling_mode_from_string(j.value("sampling", to_string(c.sampling)));
  c.validate();
  return c;
}

// sum_{t=1..H} gamma^(t-1) r_t
inline double discounted_return(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double w = 1.0;
  for (double r : rewards) {
    total += w * r;
    w *= gamma;
  }
  return total;
}

struct PlanDiagnostics {
  double best = -kInf;
  double mean = -kInf;   // over finite returns
  double worst = -kInf;  // over finite returns
  std::size_t argmax = 0;
  std::size_t invalid = 0;  // candidates with a non-finite rollout
};

struct PlanResult {
  Action action;
  PlanDiagnostics diag;
  Vector returns;  // per candidate; -inf for invalid ones
};

// Discounted model return of every candidate. Each candidate is rolled out
// from its own predicted states; rewards are scored on the predicted next
// state. Candidates whose rollout or reward turns non-finite get -inf.
inline Vector score_candidates(const DynamicsModel& m, const State& s,
                               const ActionHistory& hist,
                               const SequenceBatch& cands, double gamma,
                               const RewardFunction& reward,
                               const Vector& latent = Vector()) {
  check_dim(static_cast<std::size_t>(s.size()), m.state_dim(), "plan state");
  check_dim(cands.action_dim(), m.action_dim(), "plan candidates");
  const auto n = static_cast<Eigen::Index>(cands.population());
  Matrix states = s.replicate(1, n);
  Matrix prev = hist.last().replicate(1, n);
  Vector total = Vector::Zero(n);
  std::vector<bool> bad(static_cast<std::size_t>(n), false);
  double w = 1.0;
  for (std::size_t t = 0; t < cands.horizon(); ++t) {
    const Matrix& a = cands.step(t);
    Matrix next = m.predict_next_batch(states, a, latent);
    const Vector r = reward(next, a, prev);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (bad[k]) continue;
      if (!next.col(i).allFinite() || !std::isfinite(r[i])) {
        bad[k] = true;
        next.col(i).setZero();  // keep the batch finite for later steps
        continue;
      }
      total[i] += w * r[i];
    }
    states = std::move(next);
    prev = a;
    w *= gamma;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (bad[static_cast<std::size_t>(i)]) total[i] = -kInf;
  }
  return total;
}

// Argmax with ties resolved to the lowest index.
inline PlanResult select_best(const SequenceBatch& cands, Vector returns) {
  PlanResult out;
  PlanDiagnostics& d = out.diag;
  double sum = 0.0;
  std::size_t finite = 0;
  bool found = false;
  for (Eigen::Index i = 0; i < returns.size(); ++i) {
    const double r = returns[i];
    if (!std::isfinite(r)) {
      ++d.invalid;
      continue;
    }
    sum += r;
    ++finite;
    if (!found || r > d.best) {
      d.best = r;
      d.argmax = static_cast<std::size_t>(i);
      found = true;
    }
    if (finite == 1 || r < d.worst) d.worst = r;
  }
  if (!found) throw PlanningError("plan: every candidate rollout was invalid");
  d.mean = sum / static_cast<double>(finite);
  out.action = cands.action(0, d.argmax);
  out.returns = std::move(returns);
  return out;
}

// Scores a given candidate set; used directly with enumerated candidates.
inline PlanResult plan_candidates(const DynamicsModel& m, const State& s,
                                  const ActionHistory& hist,
                                  const SequenceBatch& cands, double gamma,
                                  const RewardFunction& reward,
                                  const Vector& latent = Vector()) {
  return select_best(cands, score_candidates(m, s, hist, cands, gamma, reward, latent));
}

// Random-shooting MPC: sample, roll out, score, return the first action of
// the best sequence.
inline PlanResult plan(const DynamicsModel& m, const State& s,
                       const ActionHistory& hist, const MpcConfig& cfg,
                       const ConstraintLimits& lim, const RewardFunction& reward,
                       const Vector& latent, std::uint64_t seed) {
  cfg.validate();
  const SequenceBatch cands =
      sample_sequences(hist, lim, cfg.horizon, cfg.population, seed, cfg.sampling);
  return plan_candidates(m, s, hist, cands, cfg.gamma, reward, latent);
}

inline PlanResult plan(const DynamicsModel& m, const State& s,
                       const ActionHistory& hist, const MpcConfig& cfg,
                       const ConstraintLimits& lim, const RewardSpec& reward,
                       const Vector& latent, std::uint64_t seed) {
  return plan(m, s, hist, cfg, lim, make_reward(reward), latent, seed);
}

}  // namespace mbmrl

#endif  // MBMRL_MPC_PLANNER_HPP_
