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

#ifndef MBMRL_DYNAMICS_MODEL_HPP_
#define MBMRL_DYNAMICS_MODEL_HPP_

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "mbmrl/common.hpp"
#include "mbmrl/dynamics/normalizer.hpp"
#include "mbmrl/nn/mlp.hpp"
#include "mbmrl/nn/weights_io.hpp"

namespace mbmrl {

// Delta-state model: s' = s + denorm(net(norm([s; a; c]))).
// latent_dim is 0 for expert models.
class DynamicsModel {
 public:
  DynamicsModel() = default;

  DynamicsModel(std::size_t state_dim, std::size_t action_dim,
                std::size_t latent_dim, std::vector<std::size_t> hidden,
                std::uint64_t seed)
      : state_dim_(state_dim), action_dim_(action_dim), latent_dim_(latent_dim) {
    if (state_dim == 0 || action_dim == 0) {
      throw ConfigError("model: state and action dims must be >= 1");
    }
    nn::MlpSpec spec{input_dim(), std::move(hidden), state_dim,
                     nn::Activation::kRelu};
    weights_ = nn::init_weights(spec, seed);
    normalizer_ = Normalizer::identity(input_dim(), state_dim);
  }

  // Wraps existing weights; spec dims must agree.
  DynamicsModel(std::size_t state_dim, std::size_t action_dim,
                std::size_t latent_dim, nn::ModelWeights weights,
                Normalizer normalizer)
      : state_dim_(state_dim),
        action_dim_(action_dim),
        latent_dim_(latent_dim),
        weights_(std::move(weights)),
        normalizer_(std::move(normalizer)) {
    check_dim(weights_.spec().input_dim, input_dim(), "model input");
    check_dim(weights_.spec().output_dim, state_dim_, "model output");
    check_dim(normalizer_.in_dim(), input_dim(), "model normalizer input");
    check_dim(normalizer_.out_dim(), state_dim_, "model normalizer output");
  }

  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  std::size_t latent_dim() const { return latent_dim_; }
  std::size_t input_dim() const { return state_dim_ + action_dim_ + latent_dim_; }

  const nn::ModelWeights& weights() const { return weights_; }
  nn::ModelWeights& weights() { return weights_; }
  const Normalizer& normalizer() const { return normalizer_; }
  void set_normalizer(Normalizer n) {
    check_dim(n.in_dim(), input_dim(), "model normalizer input");
    check_dim(n.out_dim(), state_dim_, "model normalizer output");
    normalizer_ = std::move(n);
  }

  // Denormalized delta for each column of [S; A] (latent appended to all).
  Matrix predict_delta_batch(const Matrix& states, const Matrix& actions,
                             const Vector& latent = Vector()) const {
    check_dim(static_cast<std::size_t>(states.rows()), state_dim_, "model state");
    check_dim(static_cast<std::size_t>(actions.rows()), action_dim_, "model action");
    check_dim(static_cast<std::size_t>(actions.cols()),
              static_cast<std::size_t>(states.cols()), "model batch");
    check_latent(latent);
    Matrix x(static_cast<Eigen::Index>(input_dim()), states.cols());
    const auto sd = static_cast<Eigen::Index>(state_dim_);
    const auto ad = static_cast<Eigen::Index>(action_dim_);
    x.topRows(sd) = states;
    x.middleRows(sd, ad) = actions;
    if (latent_dim_ > 0) x.bottomRows(latent.size()).colwise() = latent;
    return normalizer_.denormalize_target(
        nn::forward_batch(weights_, normalizer_.normalize_input(x)));
  }

  Matrix predict_next_batch(const Matrix& states, const Matrix& actions,
                            const Vector& latent = Vector()) const {
    return states + predict_delta_batch(states, actions, latent);
  }

  State predict_next(const State& s, const Action& a,
                     const Vector& latent = Vector()) const {
    return predict_next_batch(s, a, latent).col(0);
  }

  // actions: action_dim x H. Returns state_dim x H with column t the state
  // after applying action t.
  Matrix rollout(const State& s0, const Matrix& actions,
                 const Vector& latent = Vector()) const {
    if (actions.cols() < 1) throw ConfigError("rollout: horizon must be >= 1");
    check_dim(static_cast<std::size_t>(s0.size()), state_dim_, "rollout s0");
    Matrix out(static_cast<Eigen::Index>(state_dim_), actions.cols());
    State s = s0;
    for (Eigen::Index t = 0; t < actions.cols(); ++t) {
      s = predict_next(s, actions.col(t), latent);
      if (!s.allFinite()) {
        throw RolloutError(str_cat("rollout: non-finite state at step ", t),
                           static_cast<std::size_t>(t));
      }
      out.col(t) = s;
    }
    return out;
  }

 private:
  void check_latent(const Vector& latent) const {
    if (latent_dim_ == 0 && latent.size() != 0) {
      throw ConfigError("model: unexpected latent for an expert model");
    }
    if (latent_dim_ > 0) {
      if (latent.size() == 0) throw ConfigError("model: missing condition latent");
      check_dim(static_cast<std::size_t>(latent.size()), latent_dim_, "model latent");
      if (!latent.allFinite()) throw ConfigError("model: non-finite latent");
    }
  }

  std::size_t state_dim_ = 0;
  std::size_t action_dim_ = 0;
  std::size_t latent_dim_ = 0;
  nn::ModelWeights weights_;
  Normalizer normalizer_;
};

inline void save_model(const std::filesystem::path& stem, const DynamicsModel& m,
                       nlohmann::json extra = nlohmann::json::object()) {
  extra["kind"] = extra.value("kind", "expert");
  extra["state_dim"] = m.state_dim();
  extra["action_dim"] = m.action_dim();
  extra["latent_dim"] = m.latent_dim();
  extra["normalizer"] = normalizer_to_json(m.normalizer());
  nn::save_weights(stem, m.weights(), extra);
}

struct LoadedModel {
  DynamicsModel model;
  nlohmann::json sidecar;
};

inline LoadedModel load_model(const std::filesystem::path& stem) {
  nn::LoadedWeights lw = nn::load_weights(stem);
  const nlohmann::json& j = lw.sidecar;
  try {
    DynamicsModel m(j.at("state_dim").get<std::size_t>(),
                    j.at("action_dim").get<std::size_t>(),
                    j.value("latent_dim", std::size_t{0}), std::move(lw.weights),
                    normalizer_from_json(j.at("normalizer")));
    return {std::move(m), j};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(str_cat(stem.string(), ": ", e.what()));
  }
}

}  // namespace mbmrl

#endif  // MBMRL_DYNAMICS_MODEL_HPP_
