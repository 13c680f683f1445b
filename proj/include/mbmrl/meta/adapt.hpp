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

#ifndef MBMRL_META_ADAPT_HPP_
#define MBMRL_META_ADAPT_HPP_

#include <deque>
#include <span>
#include <vector>

#include "json.hpp"
#include "mbmrl/dynamics/dataset.hpp"
#include "mbmrl/meta/meta_model.hpp"
#include "mbmrl/mpc/episode.hpp"

namespace mbmrl {

struct AdaptConfig {
  std::size_t window = 5;  // K steps (0.1 s at 50 Hz)
  std::size_t n_inner = 5;
  double alpha = 1e-3;
  bool persist_latent = true;  // keep C_i* updates across steps

  void validate() const {
    if (window < 1) throw ConfigError("adapt: window must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("adapt: alpha must be > 0");
  }
};

inline nlohmann::json adapt_config_to_json(const AdaptConfig& c) {
  return {{"window", c.window},
          {"n_inner", c.n_inner},
          {"alpha", c.alpha},
          {"persist_latent", c.persist_latent}};
}

inline AdaptConfig adapt_config_from_json(const nlohmann::json& j) {
  AdaptConfig c;
  c.window = j.value("window", c.window);
  c.n_inner = j.value("n_inner", c.n_inner);
  c.alpha = j.value("alpha", c.alpha);
  c.persist_latent = j.value("persist_latent", c.persist_latent);
  c.validate();
  return c;
}

namespace internal {

inline NormalizedData window_data(const MetaModel& mm,
                                  std::span<const Transition> window) {
  const auto sd = static_cast<Eigen::Index>(mm.model.state_dim());
  const auto ad = static_cast<Eigen::Index>(mm.model.action_dim());
  const auto n = static_cast<Eigen::Index>(window.size());
  Matrix sa(sd + ad, n), ds(sd, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Transition& t = window[static_cast<std::size_t>(k)];
    check_dim(static_cast<std::size_t>(t.s.size()), mm.model.state_dim(), "window s");
    check_dim(static_cast<std::size_t>(t.a.size()), mm.model.action_dim(), "window a");
    sa.col(k).head(sd) = t.s;
    sa.col(k).tail(ad) = t.a;
    ds.col(k) = t.s_next - t.s;
  }
  return normalize_pairs(mm.model.normalizer(), sa, ds);
}

inline Vector likelihood_losses(const MetaModel& mm, const NormalizedData& nd,
                                const std::vector<Vector>& latents) {
  Vector out(static_cast<Eigen::Index>(latents.size()));
  for (std::size_t i = 0; i < latents.size(); ++i) {
    const Matrix err =
        nn::forward_batch(mm.model.weights(), with_latent(nd.x, latents[i])) - nd.y;
    out[static_cast<Eigen::Index>(i)] =
        err.squaredNorm() / static_cast<double>(err.size());
  }
  return out;
}

}  // namespace internal

// Per-condition normalized MSE of theta* on the window; lower means more
// likely. `latents` overrides the stored ones (e.g. online-adapted copies).
inline Vector condition_likelihood(const MetaModel& mm,
                                   std::span<const Transition> window,
                                   const std::vector<Vector>* latents = nullptr) {
  if (window.empty()) throw ConfigError("condition_likelihood: empty window");
  return internal::likelihood_losses(mm, internal::window_data(mm, window),
                                     latents ? *latents : mm.latents);
}

struct AdaptResult {
  DynamicsModel model;  // adapted theta; normalizer of the meta model
  int condition_idx = -1;
  Vector latent;        // updated C_i*
  Vector losses;        // per-condition likelihood losses
  double loss_before = 0.0;
  double loss_after = 0.0;
};

// Selects i* = argmin of the likelihood losses (ties: lowest index), then
// runs N_inner Adam steps on the window from theta*, updating theta and
// C_i*. theta* and the stored latents are left untouched.
inline AdaptResult meta_adapt_step(const MetaModel& mm,
                                   std::span<const Transition> window,
                                   const AdaptConfig& cfg,
                                   const std::vector<Vector>* latents = nullptr) {
  cfg.validate();
  if (window.empty()) throw ConfigError("meta_adapt_step: empty window");
  const std::vector<Vector>& lat = latents ? *latents : mm.latents;
  const internal::NormalizedData nd = internal::window_data(mm, window);
  AdaptResult r;
  r.losses = internal::likelihood_losses(mm, nd, lat);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < r.losses.size(); ++i) {
    if (r.losses[i] < r.losses[best]) best = i;
  }
  r.condition_idx = static_cast<int>(best);
  r.latent = lat[static_cast<std::size_t>(best)];
  r.model = mm.model;
  r.loss_before = r.losses[best];
  if (cfg.n_inner > 0) {
    internal::inner_loop(r.model.weights(), r.latent, nd.x, nd.y, cfg.n_inner,
                         cfg.alpha, 0, nullptr);
    const Matrix err =
        nn::forward_batch(r.model.weights(), internal::with_latent(nd.x, r.latent)) - nd.y;
    r.loss_after = err.squaredNorm() / static_cast<double>(err.size());
  } else {
    r.loss_after = r.loss_before;
  }
  return r;
}

// Online adaptation inside the control loop: keeps the last K transitions,
// adapts before each plan, and carries latent updates forward within an
// episode. Latents return to their meta-trained values at episode start.
class MetaAdapter : public ModelProvider {
 public:
  MetaAdapter(const MetaModel& mm, AdaptConfig cfg) : mm_(mm), cfg_(cfg) {
    cfg_.validate();
    begin_episode();
  }

  void begin_episode() override {
    window_.clear();
    step_ = 0;
    latents_ = mm_.latents;
  }

  Choice choose() override {
    if (window_.empty()) {
      // nothing observed yet: plan with theta* and the mean latent
      Vector mean = Vector::Zero(static_cast<Eigen::Index>(mm_.latent_dim()));
      for (const Vector& c : latents_) mean += c;
      mean /= static_cast<double>(latents_.size());
      current_ = mm_.model;
      return {&current_, mean, -1, Vector()};
    }
    const std::vector<Transition> w(window_.begin(), window_.end());
    AdaptResult r = meta_adapt_step(mm_, w, cfg_, &latents_);
    if (cfg_.persist_latent) {
      latents_[static_cast<std::size_t>(r.condition_idx)] = r.latent;
    }
    current_ = std::move(r.model);
    return {&current_, r.latent, r.condition_idx, r.losses};
  }

  void observe(const State& s, const Action& a, const State& s_next) override {
    window_.push_back(Transition{0, step_++, s, a, s_next});
    while (window_.size() > cfg_.window) window_.pop_front();
  }

  std::size_t num_conditions() const override { return mm_.num_conditions(); }
  const std::vector<Vector>& latents() const { return latents_; }

 private:
  const MetaModel& mm_;
  AdaptConfig cfg_;
  std::deque<Transition> window_;
  std::vector<Vector> latents_;
  DynamicsModel current_;
  std::size_t step_ = 0;
};

}  // namespace mbmrl

#endif  // MBMRL_META_ADAPT_HPP_
