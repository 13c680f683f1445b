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

#ifndef MBMRL_META_META_TRAIN_HPP_
#define MBMRL_META_META_TRAIN_HPP_

#include <vector>

#include "mbmrl/dynamics/dataset.hpp"
#include "mbmrl/meta/meta_model.hpp"

namespace mbmrl {

// Outer step multiplier (1 - n / N_outer).
inline double outer_decay(std::size_t n, std::size_t n_outer) {
  return 1.0 - static_cast<double>(n) / static_cast<double>(n_outer);
}

struct MetaTrainReport {
  std::vector<double> inner_start_loss;  // loss at the first inner step, per outer step
  std::vector<double> final_condition_loss;  // per condition, theta* with its latent
};

// Normalized loss of theta* with latent c on a dataset.
inline double meta_dataset_loss(const MetaModel& mm, const Dataset& d,
                                const Vector& c) {
  const auto nd = internal::normalize_pairs(mm.model.normalizer(), d.inputs(), d.deltas());
  const Matrix err =
      nn::forward_batch(mm.model.weights(), internal::with_latent(nd.x, c)) - nd.y;
  return err.squaredNorm() / static_cast<double>(err.size());
}

// Reptile with per-condition latents. Condition i = n mod N is visited at
// outer step n; theta starts at theta* and (theta, C_i) take N_inner Adam
// steps; theta* then moves toward theta by (1 - n/N_outer) * beta. The
// normalizer is fitted once on the union of all datasets.
inline MetaModel meta_train(const std::vector<Dataset>& datasets,
                            const MetaTrainConfig& cfg,
                            MetaTrainReport* report = nullptr) {
  cfg.validate();
  const std::size_t n_cond = datasets.size();
  if (n_cond < 2) throw ConfigError("meta_train: need at least 2 datasets");
  if (cfg.n_outer < n_cond) {
    throw ConfigError("meta_train: n_outer must visit every condition");
  }
  const std::size_t sd = datasets[0].state_dim();
  const std::size_t ad = datasets[0].action_dim();
  std::size_t total = 0;
  for (std::size_t i = 0; i < n_cond; ++i) {
    if (datasets[i].empty()) {
      throw ConfigError(str_cat("meta_train: dataset ", i, " is empty"));
    }
    check_dim(datasets[i].state_dim(), sd, "meta_train dataset state");
    check_dim(datasets[i].action_dim(), ad, "meta_train dataset action");
    total += datasets[i].size();
  }

  // normalizer on the union
  Matrix all_x(static_cast<Eigen::Index>(sd + ad), static_cast<Eigen::Index>(total));
  Matrix all_y(static_cast<Eigen::Index>(sd), static_cast<Eigen::Index>(total));
  std::vector<Matrix> raw_x, raw_y;
  Eigen::Index col = 0;
  for (const Dataset& d : datasets) {
    raw_x.push_back(d.inputs());
    raw_y.push_back(d.deltas());
    all_x.middleCols(col, raw_x.back().cols()) = raw_x.back();
    all_y.middleCols(col, raw_y.back().cols()) = raw_y.back();
    col += raw_x.back().cols();
  }

  MetaModel mm;
  mm.model = DynamicsModel(sd, ad, cfg.latent_dim, cfg.hidden, cfg.seed);
  mm.model.set_normalizer(Normalizer::fit(all_x, all_y, cfg.latent_dim));
  std::vector<internal::NormalizedData> data;
  for (std::size_t i = 0; i < n_cond; ++i) {
    data.push_back(internal::normalize_pairs(mm.model.normalizer(), raw_x[i], raw_y[i]));
    mm.tags.push_back(datasets[i].tag());
  }

  Rng latent_rng(derive_seed(cfg.seed, 1));
  std::normal_distribution<double> normal(0.0, cfg.latent_init_std);
  for (std::size_t i = 0; i < n_cond; ++i) {
    Vector c(static_cast<Eigen::Index>(cfg.latent_dim));
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      c[k] = cfg.latent_init_std > 0.0 ? normal(latent_rng) : 0.0;
    }
    mm.latents.push_back(std::move(c));
  }

  Rng batch_rng(derive_seed(cfg.seed, 2));
  nn::ModelWeights theta = mm.model.weights();
  for (std::size_t n = 0; n < cfg.n_outer; ++n) {
    const std::size_t i = n % n_cond;
    theta.flat() = mm.model.weights().flat();
    std::vector<double> losses;
    try {
      losses = internal::inner_loop(theta, mm.latents[i], data[i].x, data[i].y,
                                    cfg.n_inner, cfg.alpha, cfg.batch_size, &batch_rng);
    } catch (const TrainingError& e) {
      throw TrainingError(str_cat("meta_train: condition ", i, " diverged at outer step ",
                                  n, ": ", e.what()));
    }
    if (report) report->inner_start_loss.push_back(losses.front());
    const double step = outer_decay(n, cfg.n_outer) * cfg.beta;
    mm.model.weights().flat() += step * (theta.flat() - mm.model.weights().flat());
  }
  if (!mm.model.weights().flat().allFinite()) {
    throw TrainingError("meta_train: non-finite meta weights");
  }
  if (report) {
    for (std::size_t i = 0; i < n_cond; ++i) {
      report->final_condition_loss.push_back(meta_dataset_loss(mm, datasets[i], mm.latents[i]));
    }
  }
  return mm;
}

}  // namespace mbmrl

#endif  // MBMRL_META_META_TRAIN_HPP_
