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

#ifndef MBMRL_NN_MLP_HPP_
#define MBMRL_NN_MLP_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mbmrl/common.hpp"

namespace mbmrl::nn {

enum class Activation { kRelu };

// Fully connected network shape. Hidden layers use the activation, the
// output layer is linear.
struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims;
  std::size_t output_dim = 0;
  Activation activation = Activation::kRelu;

  // two hidden layers of 256 units
  static MlpSpec default_for(std::size_t input_dim, std::size_t output_dim) {
    return MlpSpec{input_dim, {256, 256}, output_dim, Activation::kRelu};
  }

  void validate() const {
    if (input_dim < 1) throw ConfigError("mlp: input_dim must be >= 1");
    if (output_dim < 1) throw ConfigError("mlp: output_dim must be >= 1");
    for (std::size_t h : hidden_dims) {
      if (h < 1) throw ConfigError("mlp: hidden dims must be >= 1");
    }
  }

  std::size_t num_layers() const { return hidden_dims.size() + 1; }

  std::size_t layer_in(std::size_t l) const {
    return l == 0 ? input_dim : hidden_dims[l - 1];
  }

  std::size_t layer_out(std::size_t l) const {
    return l + 1 == num_layers() ? output_dim : hidden_dims[l];
  }

  std::size_t num_params() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < num_layers(); ++l) {
      n += layer_out(l) * layer_in(l) + layer_out(l);
    }
    return n;
  }

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

// All parameters of an MlpSpec network in one flat vector. Layer l stores
// its (out x in) weight matrix column-major followed by its bias; layers are
// laid out in order. This is also the on-disk order.
class ModelWeights {
 public:
  ModelWeights() = default;

  // zero-initialized parameters
  explicit ModelWeights(MlpSpec spec, std::uint64_t seed = 0)
      : spec_(std::move(spec)), seed_(seed) {
    spec_.validate();
    params_ = Vector::Zero(static_cast<Eigen::Index>(spec_.num_params()));
    std::size_t offset = 0;
    for (std::size_t l = 0; l < spec_.num_layers(); ++l) {
      weight_offset_.push_back(offset);
      offset += spec_.layer_out(l) * spec_.layer_in(l);
      bias_offset_.push_back(offset);
      offset += spec_.layer_out(l);
    }
  }

  const MlpSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return static_cast<std::size_t>(params_.size()); }

  Vector& flat() { return params_; }
  const Vector& flat() const { return params_; }

  Eigen::Map<Matrix> weight(std::size_t l) {
    return {params_.data() + weight_offset_[l],
            static_cast<Eigen::Index>(spec_.layer_out(l)),
            static_cast<Eigen::Index>(spec_.layer_in(l))};
  }
  Eigen::Map<const Matrix> weight(std::size_t l) const {
    return {params_.data() + weight_offset_[l],
            static_cast<Eigen::Index>(spec_.layer_out(l)),
            static_cast<Eigen::Index>(spec_.layer_in(l))};
  }
  Eigen::Map<Vector> bias(std::size_t l) {
    return {params_.data() + bias_offset_[l],
            static_cast<Eigen::Index>(spec_.layer_out(l))};
  }
  Eigen::Map<const Vector> bias(std::size_t l) const {
    return {params_.data() + bias_offset_[l],
            static_cast<Eigen::Index>(spec_.layer_out(l))};
  }

  std::size_t weight_offset(std::size_t l) const { return weight_offset_[l]; }
  std::size_t bias_offset(std::size_t l) const { return bias_offset_[l]; }

 private:
  MlpSpec spec_;
  std::uint64_t seed_ = 0;
  Vector params_;
  std::vector<std::size_t> weight_offset_;
  std::vector<std::size_t> bias_offset_;
};

// He-normal hidden layers, Xavier-normal linear output, zero biases.
inline ModelWeights init_weights(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  ModelWeights w(spec, seed);
  Rng rng(seed);
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const double fan_in = static_cast<double>(spec.layer_in(l));
    const double fan_out = static_cast<double>(spec.layer_out(l));
    const bool output = l + 1 == spec.num_layers();
    const double stddev = output ? std::sqrt(2.0 / (fan_in + fan_out))
                                 : std::sqrt(2.0 / fan_in);
    std::normal_distribution<double> normal(0.0, stddev);
    auto m = w.weight(l);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = normal(rng);
    }
  }
  return w;
}

namespace internal {

inline void check_input(const ModelWeights& w, const Matrix& x) {
  check_dim(static_cast<std::size_t>(x.rows()), w.spec().input_dim,
            "mlp input");
  if (!x.allFinite()) throw DimensionError("mlp input: non-finite value");
}

}  // namespace internal

// Batched forward pass; columns of x are samples.
inline Matrix forward_batch(const ModelWeights& w, const Matrix& x) {
  internal::check_input(w, x);
  const std::size_t n_layers = w.spec().num_layers();
  Matrix a = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    Matrix z = w.weight(l) * a;
    z.colwise() += w.bias(l);
    if (l + 1 < n_layers) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

inline Vector forward(const ModelWeights& w, const Vector& x) {
  return forward_batch(w, x);
}

struct Sample {
  Vector input;
  Vector target;
};

struct LossAndGrad {
  double loss = 0.0;
  Vector grad;  // same layout as ModelWeights::flat()
};

// Mean squared error averaged over the batch and over output dimensions,
// L = 1/(B*out) * sum_b sum_k (y_bk - t_bk)^2, with its exact gradient.
// When input_grad is given it receives dL/dx (same shape as inputs).
inline LossAndGrad mse_loss_and_grad(const ModelWeights& w,
                                     const Matrix& inputs,
                                     const Matrix& targets,
                                     Matrix* input_grad = nullptr) {
  if (inputs.cols() == 0) throw ConfigError("mse: empty batch");
  internal::check_input(w, inputs);
  check_dim(static_cast<std::size_t>(targets.rows()), w.spec().output_dim,
            "mse target");
  check_dim(static_cast<std::size_t>(targets.cols()),
            static_cast<std::size_t>(inputs.cols()), "mse batch size");

  const std::size_t n_layers = w.spec().num_layers();

  // forward, keeping post-activations
  std::vector<Matrix> acts;
  acts.reserve(n_layers + 1);
  acts.push_back(inputs);
  for (std::size_t l = 0; l < n_layers; ++l) {
    Matrix z = w.weight(l) * acts.back();
    z.colwise() += w.bias(l);
    if (l + 1 < n_layers) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }

  const double scale =
      1.0 / static_cast<double>(inputs.cols() * targets.rows());
  const Matrix err = acts.back() - targets;

  LossAndGrad out;
  out.loss = err.squaredNorm() * scale;
  out.grad = Vector::Zero(static_cast<Eigen::Index>(w.size()));

  // backward
  Matrix delta = 2.0 * scale * err;
  for (std::size_t l = n_layers; l-- > 0;) {
    Eigen::Map<Matrix> gw(out.grad.data() + w.weight_offset(l),
                          static_cast<Eigen::Index>(w.spec().layer_out(l)),
                          static_cast<Eigen::Index>(w.spec().layer_in(l)));
    Eigen::Map<Vector> gb(out.grad.data() + w.bias_offset(l),
                          static_cast<Eigen::Index>(w.spec().layer_out(l)));
    gw.noalias() = delta * acts[l].transpose();
    gb = delta.rowwise().sum();
    if (l == 0 && input_grad == nullptr) break;
    Matrix back = w.weight(l).transpose() * delta;
    if (l > 0) {
      // relu'(z) = 1 where the activation is positive
      delta = back.cwiseProduct(
          (acts[l].array() > 0.0).cast<double>().matrix());
    } else {
      *input_grad = std::move(back);
    }
  }
  return out;
}

inline LossAndGrad mse_loss_and_grad(const ModelWeights& w,
                                     std::span<const Sample> batch) {
  if (batch.empty()) throw ConfigError("mse: empty batch");
  Matrix x(static_cast<Eigen::Index>(w.spec().input_dim),
           static_cast<Eigen::Index>(batch.size()));
  Matrix t(static_cast<Eigen::Index>(w.spec().output_dim),
           static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    check_dim(static_cast<std::size_t>(batch[i].input.size()),
              w.spec().input_dim, "mse sample input");
    check_dim(static_cast<std::size_t>(batch[i].target.size()),
              w.spec().output_dim, "mse sample target");
    x.col(static_cast<Eigen::Index>(i)) = batch[i].input;
    t.col(static_cast<Eigen::Index>(i)) = batch[i].target;
  }
  return mse_loss_and_grad(w, x, t);
}

}  // namespace mbmrl::nn

#endif  // MBMRL_NN_MLP_HPP_
