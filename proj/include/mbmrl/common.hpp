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

#ifndef MBMRL_COMMON_HPP_
#define MBMRL_COMMON_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbmrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using State = Eigen::VectorXd;
using Action = Eigen::VectorXd;
using Rng = std::mt19937_64;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ----- errors ----- //

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration or arguments (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Vector/matrix sizes that do not line up.
class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Numerical failure during optimization (NaN loss, non-finite gradient).
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Non-finite state produced while iterating a model.
class RolloutError : public Error {
 public:
  RolloutError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Every candidate of a planning call was invalid.
class PlanningError : public Error {
 public:
  using Error::Error;
};

// Environment misuse or failure.
class EnvError : public Error {
 public:
  using Error::Error;
};

// Malformed or missing artifact on disk.
class IoError : public Error {
 public:
  using Error::Error;
};

// ----- helpers ----- //

template <typename... Args>
std::string str_cat(const Args&... args) {
  std::ostringstream oss;
  (oss << ... << args);
  return oss.str();
}

inline void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(
        str_cat(what, ": expected dimension ", want, ", got ", got));
  }
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.allFinite();
}

// splitmix64 finalizer; used to derive independent stream seeds
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

// uniform double in [0, 1) from the top 53 bits; platform independent
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace mbmrl

#endif  // MBMRL_COMMON_HPP_
