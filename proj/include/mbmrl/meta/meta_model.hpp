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

#ifndef MBMRL_META_META_MODEL_HPP_
#define MBMRL_META_META_MODEL_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbmrl/dynamics/model.hpp"
#include "mbmrl/nn/adam.hpp"

namespace mbmrl {

struct MetaTrainConfig {
  std::size_t n_outer = 3000;
  std::size_t n_inner = 10;
  double alpha = 1e-3;         // inner Adam learning rate
  double beta = 0.5;           // outer step size
  std::size_t latent_dim = 8;
  double latent_init_std = 0.1;
  std::size_t batch_size = 256;  // inner-loop minibatch; 0 = whole dataset
  std::vector<std::size_t> hidden = {256, 256};
  std::uint64_t seed = 0;

  void validate() const {
    if (!(alpha > 0.0)) throw ConfigError("meta: alpha must be > 0");
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("meta: beta must lie in (0, 1]");
    if (latent_dim < 1) throw ConfigError("meta: latent_dim must be >= 1");
    if (!(latent_init_std >= 0.0)) throw ConfigError("meta: latent_init_std must be >= 0");
    if (n_inner < 1) throw ConfigError("meta: n_inner must be >= 1");
  }
};

inline nlohmann::json meta_config_to_json(const MetaTrainConfig& c) {
  return {{"n_outer", c.n_outer},       {"n_inner", c.n_inner},
          {"alpha", c.alpha},           {"beta", c.beta},
          {"latent_dim", c.latent_dim}, {"latent_init_std", c.latent_init_std},
          {"batch_size", c.batch_size}, {"hidden", c.hidden},
          {"seed", c.seed}};
}

inline MetaTrainConfig meta_config_from_json(const nlohmann::json& j) {
  MetaTrainConfig c;
  c.n_outer = j.value("n_outer", c.n_outer);
  c.n_inner = j.value("n_inner", c.n_inner);
  c.alpha = j.value("alpha", c.alpha);
  c.beta = j.value("beta", c.beta);
  c.latent_dim = j.value("latent_dim", c.latent_dim);
  c.latent_init_std = j.value("latent_init_std", c.latent_init_std);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.hidden = j.value("hidden", c.hidden);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

// Meta-trained weights (theta*) plus one learned latent per condition.
struct MetaModel {
  DynamicsModel model;  // latent_dim > 0; weights are theta*
  std::vector<Vector> latents;
  std::vector<std::string> tags;

  std::size_t num_conditions() const { return latents.size(); }
  std::size_t latent_dim() const { return model.latent_dim(); }
};

inline void save_meta_model(const std::filesystem::path& stem, const MetaModel& mm,
                            nlohmann::json extra = nlohmann::json::object()) {
  nlohmann::json lat = nlohmann::json::array();
  for (const Vector& c : mm.latents) lat.push_back(to_std(c));
  extra["kind"] = "meta";
  extra["latents"] = lat;
  extra["condition_tags"] = mm.tags;
  save_model(stem, mm.model, extra);
}

inline MetaModel load_meta_model(const std::filesystem::path& stem) {
  LoadedModel lm = load_model(stem);
  if (lm.sidecar.value("kind", "") != "meta") {
    throw IoError(str_cat(stem.string(), ": not a meta model"));
  }
  MetaModel mm;
  mm.model = std::move(lm.model);
  for (const auto& c : lm.sidecar.at("latents")) {
    Vector v = from_std(c.get<std::vector<double>>());
    check_dim(static_cast<std::size_t>(v.size()), mm.model.latent_dim(), "meta latent");
    mm.latents.push_back(std::move(v));
  }
  mm.tags = lm.sidecar.value("condition_tags", std::vector<std::string>{});
  if (mm.latents.size() < 2) throw IoError("meta model: need >= 2 latents");
  return mm;
}

namespace internal {

// Columns [s; a] already normalized; latent rows are appended per call.
struct NormalizedData {
  Matrix x;  // (s+a) x n
  Matrix y;  // ds x n
};

inline NormalizedData normalize_pairs(const Normalizer& nz, const Matrix& sa,
                                      const Matrix& ds) {
  const Eigen::Index k = sa.rows();
  NormalizedData out;
  out.x = ((sa.colwise() - nz.in_mean.head(k)).array().colwise() /
           nz.in_std.head(k).array())
              .matrix();
  out.y = nz.normalize_target(ds);
  return out;
}

inline Matrix with_latent(const Matrix& x, const Vector& c) {
  Matrix full(x.rows() + c.size(), x.cols());
  full.topRows(x.rows()) = x;
  full.bottomRows(c.size()).colwise() = c;
  return full;
}

// Loss and gradient of the normalized MSE with respect to theta and c.
// Latent inputs are not rescaled by the normalizer, so dL/dc is the sum of
// the input gradient rows over the batch.
inline nn::LossAndGrad loss_theta_latent(const nn::ModelWeights& w,
                                         const Matrix& x, const Matrix& y,
                                         const Vector& c, Vector* grad_c) {
  Matrix ig;
  nn::LossAndGrad lg =
      nn::mse_loss_and_grad(w, with_latent(x, c), y, grad_c ? &ig : nullptr);
  if (grad_c) *grad_c = ig.bottomRows(c.size()).rowwise().sum();
  return lg;
}

// N Adam steps on (theta, c) jointly, fresh optimizer state. Returns the loss
// observed at each step, before that step's update. With batch < n columns,
// each step draws a minibatch (with replacement) from rng.
inline std::vector<double> inner_loop(nn::ModelWeights& w, Vector& c,
                                      const Matrix& x, const Matrix& y,
                                      std::size_t steps, double alpha,
                                      std::size_t batch, Rng* rng) {
  const auto np = static_cast<Eigen::Index>(w.size());
  const Eigen::Index nl = c.size();
  nn::AdamState adam(static_cast<std::size_t>(np + nl), nn::AdamConfig{alpha});
  Vector params(np + nl);
  params.head(np) = w.flat();
  params.tail(nl) = c;
  std::vector<double> losses;
  const bool mini = batch > 0 && batch < static_cast<std::size_t>(x.cols());
  Matrix xb, yb;
  Vector gc;
  for (std::size_t k = 0; k < steps; ++k) {
    const Matrix* px = &x;
    const Matrix* py = &y;
    if (mini) {
      xb.resize(x.rows(), static_cast<Eigen::Index>(batch));
      yb.resize(y.rows(), static_cast<Eigen::Index>(batch));
      for (std::size_t b = 0; b < batch; ++b) {
        const auto j = static_cast<Eigen::Index>((*rng)() % static_cast<std::uint64_t>(x.cols()));
        xb.col(static_cast<Eigen::Index>(b)) = x.col(j);
        yb.col(static_cast<Eigen::Index>(b)) = y.col(j);
      }
      px = &xb;
      py = &yb;
    }
    nn::LossAndGrad lg = loss_theta_latent(w, *px, *py, c, &gc);
    if (!std::isfinite(lg.loss)) throw TrainingError("inner loop: non-finite loss");
    losses.push_back(lg.loss);
    Vector g(np + nl);
    g.head(np) = lg.grad;
    g.tail(nl) = gc;
    nn::adam_step(params, adam, g);
    w.flat() = params.head(np);
    c = params.tail(nl);
  }
  return losses;
}

}  // namespace internal

}  // namespace mbmrl

#endif  // MBMRL_META_META_MODEL_HPP_
