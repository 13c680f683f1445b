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

#ifndef MBMRL_DYNAMICS_NORMALIZER_HPP_
#define MBMRL_DYNAMICS_NORMALIZER_HPP_

#include <algorithm>

#include "json.hpp"
#include "mbmrl/common.hpp"

namespace mbmrl {

inline constexpr double kStdFloor = 1e-8;

// Per-dimension z-score of network inputs ([s; a; c]) and delta targets.
// Latent inputs are learned, so they keep mean 0 and std 1.
struct Normalizer {
  Vector in_mean;
  Vector in_std;
  Vector out_mean;
  Vector out_std;

  static Normalizer identity(std::size_t in_dim, std::size_t out_dim) {
    const auto ni = static_cast<Eigen::Index>(in_dim);
    const auto no = static_cast<Eigen::Index>(out_dim);
    return {Vector::Zero(ni), Vector::Ones(ni), Vector::Zero(no), Vector::Ones(no)};
  }

  // inputs: (s+a) x n, targets: ds x n. latent_dim identity entries are
  // appended to the input statistics.
  static Normalizer fit(const Matrix& inputs, const Matrix& targets,
                        std::size_t latent_dim = 0) {
    if (inputs.cols() == 0 || inputs.cols() != targets.cols()) {
      throw ConfigError("normalizer: need a non-empty, aligned sample");
    }
    auto stats = [](const Matrix& x, Vector& mean, Vector& sd) {
      const double n = static_cast<double>(x.cols());
      mean = x.rowwise().mean();
      sd = ((x.colwise() - mean).array().square().rowwise().sum() / n)
               .sqrt()
               .matrix();
      sd = sd.cwiseMax(kStdFloor);
    };
    Normalizer nz;
    Vector m, s;
    stats(inputs, m, s);
    const auto li = static_cast<Eigen::Index>(latent_dim);
    nz.in_mean = Vector::Zero(m.size() + li);
    nz.in_std = Vector::Ones(m.size() + li);
    nz.in_mean.head(m.size()) = m;
    nz.in_std.head(s.size()) = s;
    stats(targets, nz.out_mean, nz.out_std);
    return nz;
  }

  std::size_t in_dim() const { return static_cast<std::size_t>(in_mean.size()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(out_mean.size()); }

  Matrix normalize_input(const Matrix& x) const {
    return ((x.colwise() - in_mean).array().colwise() / in_std.array()).matrix();
  }
  Matrix normalize_target(const Matrix& y) const {
    return ((y.colwise() - out_mean).array().colwise() / out_std.array()).matrix();
  }
  Matrix denormalize_target(const Matrix& z) const {
    return ((z.array().colwise() * out_std.array()).matrix().colwise() + out_mean);
  }
  Matrix denormalize_input(const Matrix& z) const {
    return ((z.array().colwise() * in_std.array()).matrix().colwise() + in_mean);
  }

  friend bool operator==(const Normalizer& a, const Normalizer& b) {
    return a.in_mean == b.in_mean && a.in_std == b.in_std &&
           a.out_mean == b.out_mean && a.out_std == b.out_std;
  }
};

inline nlohmann::json normalizer_to_json(const Normalizer& n) {
  return {{"kind", "zscore"},
          {"std_floor", kStdFloor},
          {"in_mean", to_std(n.in_mean)},
          {"in_std", to_std(n.in_std)},
          {"out_mean", to_std(n.out_mean)},
          {"out_std", to_std(n.out_std)}};
}

inline Normalizer normalizer_from_json(const nlohmann::json& j) {
  Normalizer n;
  n.in_mean = from_std(j.at("in_mean").get<std::vector<double>>());
  n.in_std = from_std(j.at("in_std").get<std::vector<double>>());
  n.out_mean = from_std(j.at("out_mean").get<std::vector<double>>());
  n.out_std = from_std(j.at("out_std").get<std::vector<double>>());
  if (n.in_mean.size() != n.in_std.size() ||
      n.out_mean.size() != n.out_std.size()) {
    throw IoError("normalizer: mismatched sizes");
  }
  if ((n.in_std.array() <= 0.0).any() || (n.out_std.array() <= 0.0).any()) {
    throw IoError("normalizer: non-positive std");
  }
  return n;
}

}  // namespace mbmrl

#endif  // MBMRL_DYNAMICS_NORMALIZER_HPP_
