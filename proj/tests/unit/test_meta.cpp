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

#include <gtest/gtest.h>

#include "mbmrl/dynamics/collect.hpp"
#include "mbmrl/envs/friction_cart.hpp"
#include "mbmrl/meta/adapt.hpp"
#include "mbmrl/meta/meta_train.hpp"
#include "support/oracles.hpp"

namespace mbmrl {
namespace {

std::vector<Dataset> friction_datasets(std::vector<double> mus, std::size_t len) {
  FrictionCartEnv env;
  std::vector<Dataset> out;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    out.push_back(collect_random_episodes(env, ConditionSpec::friction(mus[i]),
                                          env.default_limits(), 2, len, 10 + i));
  }
  return out;
}

MetaTrainConfig small_config() {
  MetaTrainConfig c;
  c.n_outer = 300;
  c.n_inner = 5;
  c.latent_dim = 2;
  c.hidden = {16, 16};
  c.batch_size = 64;
  c.seed = 4;
  return c;
}

// Window of K transitions whose next states come from theta* with C_i.
std::vector<Transition> synthesize(const MetaModel& mm, std::size_t i, const Dataset& src,
                                   std::size_t start, std::size_t k) {
  std::vector<Transition> w;
  for (std::size_t j = start; j < start + k; ++j) {
    Transition t = src[j];
    t.s_next = mm.model.predict_next(t.s, t.a, mm.latents[i]);
    w.push_back(t);
  }
  return w;
}

TEST(Meta, OuterDecaySchedule) {
  EXPECT_DOUBLE_EQ(outer_decay(0, 100), 1.0);
  EXPECT_DOUBLE_EQ(outer_decay(50, 100), 0.5);
  EXPECT_NEAR(outer_decay(99, 100), 0.01, 1e-15);
}

TEST(Meta, LatentGradientMatchesFiniteDifferences) {
  Rng rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  nn::ModelWeights w = nn::init_weights(nn::MlpSpec{3, {6}, 2, nn::Activation::kRelu}, 3);
  Matrix x(2, 5), y(2, 5);
  for (Eigen::Index j = 0; j < 5; ++j) {
    for (Eigen::Index i = 0; i < 2; ++i) {
      x(i, j) = n(rng);
      y(i, j) = n(rng);
    }
  }
  Vector c(1);
  c << 0.3;
  Vector gc;
  internal::loss_theta_latent(w, x, y, c, &gc);
  const auto fd = oracle::fd_gradient(
      [&](const oracle::Vec& p) {
        Vector cc(1);
        cc << p[0];
        return internal::loss_theta_latent(w, x, y, cc, nullptr).loss;
      },
      {0.3}, 1e-6);
  EXPECT_NEAR(gc[0], fd[0], 1e-6 * std::max(1.0, std::abs(fd[0])));
}

TEST(Meta, ReptileUpdateMatchesReference) {
  const auto ds = friction_datasets({0.2, 0.6}, 40);
  MetaTrainConfig cfg = small_config();
  cfg.n_outer = 2;
  cfg.n_inner = 3;
  cfg.batch_size = 0;
  cfg.latent_init_std = 0.0;
  cfg.beta = 0.5;
  const MetaModel mm = meta_train(ds, cfg);

  // theta_0 as constructed, latents start at zero
  DynamicsModel ref(1, 1, 2, cfg.hidden, cfg.seed);
  nn::ModelWeights theta_star = ref.weights();
  for (std::size_t n = 0; n < 2; ++n) {
    const auto nd = internal::normalize_pairs(mm.model.normalizer(), ds[n].inputs(),
                                              ds[n].deltas());
    nn::ModelWeights theta = theta_star;
    Vector c = Vector::Zero(2);
    internal::inner_loop(theta, c, nd.x, nd.y, cfg.n_inner, cfg.alpha, 0, nullptr);
    const double step = (1.0 - static_cast<double>(n) / 2.0) * cfg.beta;
    theta_star.flat() += step * (theta.flat() - theta_star.flat());
    EXPECT_TRUE(c.isApprox(mm.latents[n], 1e-12));
  }
  EXPECT_TRUE(theta_star.flat().isApprox(mm.model.weights().flat(), 1e-12));
}

TEST(Meta, TrainingIsDeterministicAndReducesLoss) {
  const auto ds = friction_datasets({0.2, 0.4, 0.6}, 60);
  MetaTrainReport ra, rb;
  const MetaModel a = meta_train(ds, small_config(), &ra);
  const MetaModel b = meta_train(ds, small_config(), &rb);
  EXPECT_TRUE(a.model.weights().flat() == b.model.weights().flat());
  EXPECT_EQ(a.latents.size(), 3u);
  EXPECT_EQ(a.tags[1], ds[1].tag());
  ASSERT_EQ(ra.inner_start_loss.size(), 300u);
  EXPECT_LT(ra.inner_start_loss.back(), ra.inner_start_loss.front());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(ra.final_condition_loss[i], meta_dataset_loss(a, ds[i], a.latents[i]), 1e-12);
  }
}

TEST(Meta, RejectsBadInputs) {
  auto ds = friction_datasets({0.2}, 20);
  EXPECT_THROW(meta_train(ds, small_config()), ConfigError);
  ds.push_back(Dataset(2, 1));
  ds.back().add(0, 0, State::Zero(2), Action::Zero(1), State::Zero(2));
  EXPECT_THROW(meta_train(ds, small_config()), DimensionError);
  MetaTrainConfig bad = small_config();
  bad.beta = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

class MetaAdaptTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new std::vector<Dataset>(friction_datasets({0.2, 0.4, 0.6}, 80));
    mm_ = new MetaModel(meta_train(*data_, small_config()));
  }
  static void TearDownTestSuite() {
    delete mm_;
    delete data_;
  }
  static std::vector<Dataset>* data_;
  static MetaModel* mm_;
};
std::vector<Dataset>* MetaAdaptTest::data_ = nullptr;
MetaModel* MetaAdaptTest::mm_ = nullptr;

TEST_F(MetaAdaptTest, SelfConsistentWindowsPickTheirCondition) {
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t start : {5u, 40u, 100u}) {
      const auto w = synthesize(*mm_, i, (*data_)[i], start, 5);
      const AdaptResult r = meta_adapt_step(*mm_, w, AdaptConfig{});
      EXPECT_EQ(r.condition_idx, static_cast<int>(i));
      EXPECT_NEAR(r.losses[static_cast<Eigen::Index>(i)], 0.0, 1e-20);
    }
  }
}

TEST_F(MetaAdaptTest, SwappedLatentsSwapTheChoice) {
  const auto w = synthesize(*mm_, 0, (*data_)[0], 10, 5);
  std::vector<Vector> swapped = mm_->latents;
  std::swap(swapped[0], swapped[2]);
  const Vector plain = condition_likelihood(*mm_, w);
  const Vector sw = condition_likelihood(*mm_, w, &swapped);
  EXPECT_DOUBLE_EQ(plain[0], sw[2]);
  EXPECT_DOUBLE_EQ(plain[2], sw[0]);
  EXPECT_EQ(meta_adapt_step(*mm_, w, AdaptConfig{}, &swapped).condition_idx, 2);
}

TEST_F(MetaAdaptTest, ZeroInnerStepsKeepsThetaStar) {
  const auto w = synthesize(*mm_, 1, (*data_)[1], 0, 5);
  AdaptConfig cfg;
  cfg.n_inner = 0;
  const AdaptResult r = meta_adapt_step(*mm_, w, cfg);
  EXPECT_TRUE(r.model.weights().flat() == mm_->model.weights().flat());
  EXPECT_TRUE(r.latent == mm_->latents[1]);
  EXPECT_DOUBLE_EQ(r.loss_after, r.loss_before);
}

TEST_F(MetaAdaptTest, InnerStepsFitTheWindow) {
  // a window from real data: adaptation lowers the window loss
  std::vector<Transition> w((*data_)[2].begin() + 20, (*data_)[2].begin() + 25);
  AdaptConfig cfg;
  cfg.n_inner = 10;
  const AdaptResult r = meta_adapt_step(*mm_, w, cfg);
  EXPECT_LT(r.loss_after, r.loss_before);
  EXPECT_THROW(meta_adapt_step(*mm_, std::vector<Transition>{}, cfg), ConfigError);
}

TEST_F(MetaAdaptTest, AdapterWindowAndEpisodeReset) {
  AdaptConfig cfg;
  cfg.window = 3;
  MetaAdapter ad(*mm_, cfg);
  auto first = ad.choose();
  EXPECT_EQ(first.condition_idx, -1);
  Vector mean = (mm_->latents[0] + mm_->latents[1] + mm_->latents[2]) / 3.0;
  EXPECT_TRUE(first.latent.isApprox(mean, 1e-15));
  for (std::size_t k = 0; k < 5; ++k) {
    const auto& t = (*data_)[0][k];
    ad.observe(t.s, t.a, t.s_next);
  }
  const auto c = ad.choose();
  EXPECT_GE(c.condition_idx, 0);
  EXPECT_EQ(c.condition_losses.size(), 3);
  const auto idx = static_cast<std::size_t>(c.condition_idx);
  EXPECT_FALSE(ad.latents()[idx] == mm_->latents[idx]);  // persisted update
  ad.begin_episode();
  EXPECT_TRUE(ad.latents()[idx] == mm_->latents[idx]);
  EXPECT_EQ(ad.choose().condition_idx, -1);
}

TEST_F(MetaAdaptTest, SaveLoadRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "mbmrl_meta";
  std::filesystem::create_directories(dir);
  save_meta_model(dir / "m", *mm_);
  const MetaModel back = load_meta_model(dir / "m");
  EXPECT_TRUE(back.model.weights().flat() == mm_->model.weights().flat());
  ASSERT_EQ(back.latents.size(), 3u);
  EXPECT_TRUE(back.latents[2] == mm_->latents[2]);
  EXPECT_EQ(back.tags, mm_->tags);
  save_model(dir / "e", DynamicsModel(1, 1, 0, {4}, 1));
  EXPECT_THROW(load_meta_model(dir / "e"), IoError);
}

}  // namespace
}  // namespace mbmrl
