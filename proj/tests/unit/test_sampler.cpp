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

#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "mbmrl/sampler/sampler.hpp"
#include "support/oracles.hpp"

namespace mbmrl {
namespace {

oracle::AxisBounds bounds(const ConstraintLimits& lim, std::size_t d) {
  const auto i = static_cast<Eigen::Index>(d);
  return {lim.q_min[i], lim.q_max[i], lim.v_max[i], lim.a_max[i], lim.j_max[i], lim.dt};
}

std::size_t oracle_violations(const SequenceBatch& b, const ActionHistory& h,
                              const ConstraintLimits& lim, std::string* what) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < b.population(); ++i) {
    for (std::size_t d = 0; d < lim.dims(); ++d) {
      const auto r = static_cast<Eigen::Index>(d);
      std::vector<double> x = {h.third_last()[r], h.second_last()[r], h.last()[r]};
      for (std::size_t t = 0; t < b.horizon(); ++t) x.push_back(b.step(t)(r, i));
      bad += oracle::count_violations(x, 3, bounds(lim, d), what);
    }
  }
  return bad;
}

ConstraintLimits cart_limits() {
  return ConstraintLimits::uniform(1, -2.0, 2.0, 6.0, 60.0, 1500.0, 0.02);
}

TEST(Sampler, ShapeAndDeterminism) {
  const auto lim = cart_limits();
  const auto h = ActionHistory::constant(Action::Zero(1));
  const SequenceBatch a = sample_sequences(h, lim, 7, 13, 42);
  const SequenceBatch b = sample_sequences(h, lim, 7, 13, 42);
  EXPECT_EQ(a.horizon(), 7u);
  EXPECT_EQ(a.population(), 13u);
  for (std::size_t t = 0; t < 7; ++t) EXPECT_TRUE(a.step(t) == b.step(t));
  const SequenceBatch c = sample_sequences(h, lim, 7, 13, 43);
  EXPECT_FALSE(a.step(3) == c.step(3));
}

TEST(Sampler, CandidateStreamsIndependentOfPopulation) {
  const auto lim = cart_limits();
  const auto h = ActionHistory::constant(Action::Zero(1));
  const SequenceBatch small = sample_sequences(h, lim, 5, 3, 9);
  const SequenceBatch big = sample_sequences(h, lim, 5, 50, 9);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(small.sequence(i) == big.sequence(i));
}

TEST(Sampler, ConstrainedSequencesPassIndependentChecker) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dims = 1 + trial % 3;
    ConstraintLimits lim = ConstraintLimits::uniform(
        dims, -1.0 - u(rng), 0.5 + u(rng), 0.5 + 5 * u(rng), 5 + 50 * u(rng),
        trial % 5 == 0 ? kInf : 100 + 2000 * u(rng), 0.02);
    Action a0 = Action::Zero(static_cast<Eigen::Index>(dims));
    ActionHistory h = ActionHistory::constant(a0);
    // walk the history forward with the sampler itself
    const SequenceBatch warm = sample_sequences(h, lim, 10, 1, trial);
    for (std::size_t t = 0; t < 10; ++t) h.push(warm.action(t, 0));
    const SequenceBatch b = sample_sequences(h, lim, 25, 40, 100 + trial);
    std::string what;
    EXPECT_EQ(oracle_violations(b, h, lim, &what), 0u) << what;
    // the library checker must agree
    for (std::size_t i = 0; i < b.population(); ++i) {
      EXPECT_TRUE(check_sequence(b.sequence(i), h, lim).empty());
    }
  }
}

TEST(Sampler, UniformModeStaysInPositionBounds) {
  const auto lim = cart_limits();
  const auto h = ActionHistory::constant(Action::Zero(1));
  const SequenceBatch b = sample_sequences(h, lim, 20, 50, 1, SamplingMode::kUniform);
  double jerk_sum = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t t = 0; t < 20; ++t) {
      EXPECT_GE(b.step(t)(0, i), -2.0);
      EXPECT_LE(b.step(t)(0, i), 2.0);
    }
    for (const auto& v : check_sequence(b.sequence(i), h, lim)) {
      if (v.kind == ViolationKind::kJerk) jerk_sum += 1;
    }
  }
  // uniform draws ignore the rate limits, so the checker must catch them
  EXPECT_GT(jerk_sum, 0.0);
}

TEST(Sampler, ZeroVelocityLimitFreezesCommand) {
  auto lim = ConstraintLimits::uniform(1, -1.0, 1.0, 0.0, 10.0, 10.0, 0.02);
  Action a0(1);
  a0 << 0.3;
  const SequenceBatch b = sample_sequences(ActionHistory::constant(a0), lim, 6, 4, 2);
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(b.step(t)(0, i), 0.3);
  }
}

TEST(Sampler, InfiniteRateLimitsReduceToPositionBox) {
  auto lim = ConstraintLimits::uniform(1, -1.0, 1.0, kInf, kInf, kInf, 0.02);
  Action a0 = Action::Zero(1);
  const Interval iv = feasible_interval(ActionHistory::constant(a0), lim, 0);
  EXPECT_DOUBLE_EQ(iv.lo, -1.0);
  EXPECT_DOUBLE_EQ(iv.hi, 1.0);
  EXPECT_FALSE(iv.fallback);
}

TEST(Sampler, FeasibleIntervalHandExample) {
  // rest at 0, dt=0.1: V band 0.1*1=0.1, A band 0.01*2=0.02, J band 0.001*5
  auto lim = ConstraintLimits::uniform(1, -1.0, 1.0, 1.0, 2.0, 5.0, 0.1);
  const Interval iv = feasible_interval(ActionHistory::constant(Action::Zero(1)), lim, 0);
  EXPECT_NEAR(iv.lo, -0.005, 1e-15);
  EXPECT_NEAR(iv.hi, 0.005, 1e-15);
}

TEST(Sampler, RejectsBadArguments) {
  const auto lim = cart_limits();
  const auto h = ActionHistory::constant(Action::Zero(1));
  EXPECT_THROW(sample_sequences(h, lim, 0, 3, 1), ConfigError);
  EXPECT_THROW(sample_sequences(h, lim, 3, 0, 1), ConfigError);
  EXPECT_THROW(sample_sequences(ActionHistory::constant(Action::Zero(2)), lim, 3, 3, 1),
               DimensionError);
  auto bad = lim;
  bad.v_max[0] = -1.0;
  EXPECT_THROW(sample_sequences(h, bad, 3, 3, 1), ConfigError);
}

TEST(Limits, JsonRoundTripKeepsInfinity) {
  auto lim = ConstraintLimits::uniform(2, -1.0, 1.0, kInf, 3.0, kInf, 0.05);
  const ConstraintLimits back = limits_from_json(limits_to_json(lim), 0.02);
  EXPECT_TRUE(std::isinf(back.v_max[1]));
  EXPECT_DOUBLE_EQ(back.a_max[0], 3.0);
  EXPECT_DOUBLE_EQ(back.dt, 0.05);
}

}  // namespace
}  // namespace mbmrl
