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

#ifndef MBMRL_DYNAMICS_TRAIN_HPP_
#define MBMRL_DYNAMICS_TRAIN_HPP_

#include <numeric>
#include <vector>

#include "json.hpp"
#include "mbmrl/dynamics/dataset.hpp"
#include "mbmrl/dynamics/model.hpp"
#include "mbmrl/nn/adam.hpp"

namespace mbmrl {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;

  void validate() const {
    if (batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning rate must be > 0");
  }
};

inline nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

struct TrainReport {
  std::vector<double> epoch_loss;  // mean minibatch loss per epoch
  double final_loss = 0.0;         // full-dataset normalized MSE after training
  std::size_t steps = 0;
};

namespace internal {

// Fisher-Yates driven by the raw engine output so the permutation does not
// depend on the standard library's distribution implementations.
inline void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

inline void gather_columns(const Matrix& src, const std::vector<std::size_t>& idx,
                           std::size_t begin, std::size_t end, Matrix& dst) {
  dst.resize(src.rows(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t k = begin; k < end; ++k) {
    dst.col(static_cast<Eigen::Index>(k - begin)) =
        src.col(static_cast<Eigen::Index>(idx[k]));
  }
}

}  // namespace internal

// Normalized MSE of the model on a dataset (latent appended if given).
inline double dataset_loss(const DynamicsModel& m, const Dataset& d,
                           const Vector& latent = Vector()) {
  if (d.empty()) throw ConfigError("loss: empty dataset");
  Matrix x(static_cast<Eigen::Index>(m.input_dim()), static_cast<Eigen::Index>(d.size()));
  const Matrix sa = d.inputs();
  x.topRows(sa.rows()) = sa;
  if (m.latent_dim() > 0) {
    check_dim(static_cast<std::size_t>(latent.size()), m.latent_dim(), "loss latent");
    x.bottomRows(latent.size()).colwise() = latent;
  }
  const Matrix xn = m.normalizer().normalize_input(x);
  const Matrix yn = m.normalizer().normalize_target(d.deltas());
  const Matrix err = nn::forward_batch(m.weights(), xn) - yn;
  return err.squaredNorm() / static_cast<double>(err.size());
}

// Refits the normalizer on d, then runs minibatch Adam on the normalized
// delta MSE. Adam state starts fresh on every call. Expert models only.
inline TrainReport train(DynamicsModel& m, const Dataset& d, const TrainConfig& cfg) {
  cfg.validate();
  TrainReport report;
  if (cfg.epochs == 0) return report;
  if (d.empty()) throw ConfigError("train: empty dataset");
  if (m.latent_dim() != 0) {
    throw ConfigError("train: use meta training for latent-conditioned models");
  }
  if (d.size() < cfg.batch_size) {
    throw ConfigError(str_cat("train: dataset (", d.size(),
                              ") smaller than batch size (", cfg.batch_size, ")"));
  }
  check_dim(d.state_dim(), m.state_dim(), "train dataset state");
  check_dim(d.action_dim(), m.action_dim(), "train dataset action");

  const Matrix x_raw = d.inputs();
  const Matrix y_raw = d.deltas();
  m.set_normalizer(Normalizer::fit(x_raw, y_raw));
  const Matrix x = m.normalizer().normalize_input(x_raw);
  const Matrix y = m.normalizer().normalize_target(y_raw);

  nn::AdamState adam(m.weights().size(), nn::AdamConfig{cfg.learning_rate});
  Rng rng(cfg.seed);
  std::vector<std::size_t> idx(d.size());
  Matrix xb, yb;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    internal::shuffle_indices(idx, rng);
    double sum = 0.0;
    for (std::size_t b = 0; b < idx.size(); b += cfg.batch_size) {
      const std::size_t end = std::min(b + cfg.batch_size, idx.size());
      internal::gather_columns(x, idx, b, end, xb);
      internal::gather_columns(y, idx, b, end, yb);
      nn::LossAndGrad lg = nn::mse_loss_and_grad(m.weights(), xb, yb);
      if (!std::isfinite(lg.loss)) {
        throw TrainingError(str_cat("train: non-finite loss at epoch ", e,
                                    ", batch starting at ", b));
      }
      nn::adam_step(m.weights().flat(), adam, lg.grad);
      sum += lg.loss * static_cast<double>(end - b);
      ++report.steps;
    }
    report.epoch_loss.push_back(sum / static_cast<double>(idx.size()));
  }
  const Matrix err = nn::forward_batch(m.weights(), x) - y;
  report.final_loss = err.squaredNorm() / static_cast<double>(err.size());
  if (!std::isfinite(report.final_loss)) {
    throw TrainingError("train: non-finite final loss");
  }
  return report;
}

}  // namespace mbmrl

#endif  // MBMRL_DYNAMICS_TRAIN_HPP_
