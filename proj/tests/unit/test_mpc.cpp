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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "mbmrl/envs/friction_cart.hpp"
#include "mbmrl/mpc/mbrl.hpp"
#include "support/oracles.hpp"

namespace mbmrl {
namespace {

Action act(double v) {
  Action a(1);
  a << v;
  return a;
}

// s' = s + a, exactly, through the model API
DynamicsModel integrator() {
  nn::ModelWeights w(nn::MlpSpec{2, {}, 1, nn::Activation::kRelu});
  w.weight(0)(0, 1) = 1.0;
  return DynamicsModel(1, 1, 0, std::move(w), Normalizer::identity(2, 1));
}

// Every sequence over per-step value sets of size k (k^H candidates).
SequenceBatch enumerate(const std::vector<std::vector<double>>& values,
                        oracle::Mat* as_rows) {
  std::size_t n = 1;
  for (const auto& v : values) n *= v.size();
  SequenceBatch b(values.size(), n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t code = i;
    oracle::Vec row;
    for (std::size_t t = 0; t < values.size(); ++t) {
      const double a = values[t][code % values[t].size()];
      code /= values[t].size();
      b.step(t)(0, static_cast<Eigen::Index>(i)) = a;
      row.push_back(a);
    }
    as_rows->push_back(row);
  }
  return b;
}

TEST(DiscountedReturn, Examples) {
  const std::vector<double> r = {1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(discounted_return(r, 0.5), 1.75);
  EXPECT_DOUBLE_EQ(discounted_return(r, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(discounted_return(r, 0.0), 1.0);
  const std::vector<double> r2 = {2.0, -1.0, 4.0, 0.5};
  EXPECT_NEAR(discounted_return(r2, 0.9), oracle::discounted(r2, 0.9), 1e-15);
}

TEST(Planner, MatchesBruteForceOnIntegrator) {
  const DynamicsModel m = integrator();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> vals(5, std::vector<double>(3));
    for (auto& v : vals)
      for (auto& x : v) x = u(rng);
    oracle::Mat rows;
    const SequenceBatch cands = enumerate(vals, &rows);
    RewardSpec spec;
    spec.v_des = u(rng);
    spec.w_u = 0.1;
    const double s0 = u(rng), a_prev = u(rng), gamma = 0.9;
    oracle::Vec ref_returns;
    const std::size_t want =
        oracle::brute_force_argmax(rows, s0, a_prev, spec.v_des, spec.w_u, gamma, &ref_returns);
    const PlanResult pr = plan_candidates(m, act(s0), ActionHistory::constant(act(a_prev)),
                                          cands, gamma, make_reward(spec));
    EXPECT_EQ(pr.diag.argmax, want);
    EXPECT_DOUBLE_EQ(pr.action[0], rows[want][0]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_NEAR(pr.returns[static_cast<Eigen::Index>(i)], ref_returns[i], 1e-12);
    }
  }
}

TEST(Planner, TiesGoToLowestIndex) {
  const DynamicsModel m = integrator();
  SequenceBatch b(2, 4, 1);
  const double seq[4][2] = {{0.1, 0.0}, {0.5, 0.0}, {0.5, 0.0}, {0.3, 0.0}};
  for (int i = 0; i < 4; ++i)
    for (int t = 0; t < 2; ++t) b.step(t)(0, i) = seq[i][t];
  RewardSpec spec;
  spec.v_des = 0.5;
  spec.w_u = 0.0;
  const PlanResult pr = plan_candidates(m, act(0.0), ActionHistory::constant(act(0.0)), b,
                                        0.9, make_reward(spec));
  EXPECT_EQ(pr.diag.argmax, 1u);
}

TEST(Planner, InvariantToPermutationAndRewardShift) {
  const DynamicsModel m = integrator();
  const auto lim = ConstraintLimits::uniform(1, -1.0, 1.0, 5.0, 100.0, 5000.0, 0.02);
  const auto hist = ActionHistory::constant(act(0.0));
  const SequenceBatch cands = sample_sequences(hist, lim, 6, 200, 4);
  RewardSpec spec;
  spec.v_des = 0.3;
  const auto reward = make_reward(spec);
  const PlanResult base = plan_candidates(m, act(0.1), hist, cands, 0.95, reward);

  std::vector<std::size_t> perm(200);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(7));
  SequenceBatch shuffled(6, 200, 1);
  for (std::size_t i = 0; i < 200; ++i) shuffled.set_sequence(i, cands.sequence(perm[i]));
  const PlanResult p2 = plan_candidates(m, act(0.1), hist, shuffled, 0.95, reward);
  EXPECT_EQ(perm[p2.diag.argmax], base.diag.argmax);

  const RewardFunction shifted = [&](const Matrix& s, const Matrix& a, const Matrix& ap) {
    return Vector(reward(s, a, ap).array() + 3.0);
  };
  EXPECT_EQ(plan_candidates(m, act(0.1), hist, cands, 0.95, shifted).diag.argmax,
            base.diag.argmax);
}

TEST(Planner, InvalidRolloutsAreExcluded) {
  nn::ModelWeights w(nn::MlpSpec{2, {}, 1, nn::Activation::kRelu});
  w.weight(0)(0, 1) = 1e150;  // reward of big actions overflows
  DynamicsModel m(1, 1, 0, std::move(w), Normalizer::identity(2, 1));
  SequenceBatch b(2, 3, 1);
  b.step(0) << 1.0, 0.0, 1e10;
  b.step(1) << 1.0, 0.0, 0.0;
  RewardSpec spec;
  spec.w_u = 0.0;
  const PlanResult pr = plan_candidates(m, act(0.0), ActionHistory::constant(act(0.0)), b,
                                        0.9, make_reward(spec));
  EXPECT_EQ(pr.diag.invalid, 1u);
  EXPECT_TRUE(std::isinf(pr.returns[2]));

  SequenceBatch all_bad(1, 2, 1);
  all_bad.step(0) << 1e10, -1e10;
  EXPECT_THROW(plan_candidates(m, act(0.0), ActionHistory::constant(act(0.0)), all_bad, 0.9,
                               make_reward(spec)),
               PlanningError);
}

TEST(Planner, PlannedActionRespectsLimitsAndSeed) {
  const DynamicsModel m = integrator();
  const auto lim = ConstraintLimits::uniform(1, -2.0, 2.0, 6.0, 60.0, 1500.0, 0.02);
  const auto hist = ActionHistory::constant(act(0.0));
  MpcConfig cfg;
  cfg.horizon = 5;
  cfg.population = 50;
  RewardSpec spec;
  const PlanResult a = plan(m, act(0.0), hist, cfg, lim, spec, Vector(), 3);
  const PlanResult b = plan(m, act(0.0), hist, cfg, lim, spec, Vector(), 3);
  EXPECT_EQ(a.action[0], b.action[0]);
  const Interval iv = feasible_interval(hist, lim, 0);
  EXPECT_TRUE(iv.contains(a.action[0]));
  EXPECT_GE(a.diag.best, a.diag.mean);
  EXPECT_GE(a.diag.mean, a.diag.worst);
}

TEST(Vdes, Schedules) {
  const auto r = VdesSchedule::ramp(0.5, -0.2, 10.0);
  EXPECT_NEAR(r.at(5.0), 0.15, 1e-15);
  EXPECT_DOUBLE_EQ(r.at(12.0), -0.2);
  const auto p = VdesSchedule::piecewise(0.5, -0.2, 0.5, 2.0, 9);
  EXPECT_DOUBLE_EQ(p.at(1.9), 0.5);
  EXPECT_DOUBLE_EQ(p.at(2.0), p.at(3.9));
  EXPECT_GE(p.at(4.5), -0.2);
  EXPECT_LE(p.at(4.5), 0.5);
  EXPECT_EQ(vdes_to_json(vdes_from_json(vdes_to_json(p))), vdes_to_json(p));
}

TEST(Episode, RunsDeterministicallyWithinLimits) {
  FrictionCartEnv env;
  const DynamicsModel m(1, 1, 0, {8}, 1);
  FixedModel provider(m);
  EpisodeConfig ec;
  ec.steps = 40;
  ec.limits = env.default_limits();
  ec.mpc.horizon = 4;
  ec.mpc.population = 20;
  ec.seed = 5;
  const EpisodeLog a = run_episode(env, ConditionSpec::friction(0.5), provider, ec);
  const EpisodeLog b = run_episode(env, ConditionSpec::friction(0.5), provider, ec);
  ASSERT_EQ(a.steps.size(), 40u);
  std::ostringstream sa, sb;
  write_episode_csv(sa, a);
  write_episode_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  // executed commands obey the jerk limit (warm-up included)
  for (double j : a.executed_jerk(0.02)) EXPECT_LE(std::abs(j), 1500.0 * (1 + 1e-9));
  EXPECT_NEAR(a.steps[10].time, 0.2, 1e-12);

  ec.steps = 0;
  const EpisodeLog empty = run_episode(env, ConditionSpec::friction(0.5), provider, ec);
  EXPECT_TRUE(empty.steps.empty());
  EXPECT_EQ(empty.initial_state.size(), 1);
}

TEST(Expert, LoopProducesEpisodesAndReports) {
  FrictionCartEnv env;
  EpisodeConfig ec;
  ec.limits = env.default_limits();
  ec.mpc.horizon = 4;
  ec.mpc.population = 20;
  ExpertConfig cfg;
  cfg.n_init = 1;
  cfg.n_training = 2;
  cfg.steps = 30;
  cfg.hidden = {8};
  cfg.train.epochs = 2;
  cfg.seed = 2;
  std::size_t calls = 0;
  const ExpertResult r = train_expert(env, ConditionSpec::friction(0.8), cfg, ec,
                                      [&](const EpisodeMetrics&, const EpisodeLog&) { ++calls; });
  EXPECT_EQ(calls, 3u);
  EXPECT_EQ(r.episodes.front().controller, "random");
  EXPECT_EQ(r.episodes.back().controller, "mpc");
  EXPECT_EQ(r.reports.size(), 3u);  // two rounds plus the final pass
  EXPECT_EQ(r.dataset.size(), 90u);
}

}  // namespace
}  // namespace mbmrl
