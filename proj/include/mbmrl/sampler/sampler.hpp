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

#ifndef MBMRL_SAMPLER_SAMPLER_HPP_
#define MBMRL_SAMPLER_SAMPLER_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mbmrl/common.hpp"
#include "mbmrl/sampler/limits.hpp"

namespace mbmrl {

// Closed interval of admissible next values for one action dimension.
// `fallback` is set when the four constraint bands had an empty
// intersection and only the position and velocity bands were kept.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool fallback = false;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class SamplingMode {
  kConstrained,  // position, velocity, acceleration and jerk limits
  kUniform,      // independent uniform draws in [q_min, q_max]
};

inline std::string to_string(SamplingMode m) {
  return m == SamplingMode::kConstrained ? "constrained" : "uniform";
}

inline SamplingMode sampling_mode_from_string(const std::string& s) {
  if (s == "constrained") return SamplingMode::kConstrained;
  if (s == "uniform") return SamplingMode::kUniform;
  throw ConfigError(str_cat("unknown sampling mode '", s, "'"));
}

// N_pop candidate sequences of horizon H, stored step-major: step(t) is an
// (action_dim x population) matrix so a whole population can be pushed
// through a model in one batch.
class SequenceBatch {
 public:
  SequenceBatch(std::size_t horizon, std::size_t population,
                std::size_t action_dim)
      : population_(population), action_dim_(action_dim) {
    steps_.assign(horizon, Matrix::Zero(static_cast<Eigen::Index>(action_dim),
                                        static_cast<Eigen::Index>(population)));
  }

  std::size_t horizon() const { return steps_.size(); }
  std::size_t population() const { return population_; }
  std::size_t action_dim() const { return action_dim_; }

  const Matrix& step(std::size_t t) const { return steps_[t]; }
  Matrix& step(std::size_t t) { return steps_[t]; }

  Action action(std::size_t t, std::size_t i) const {
    return steps_[t].col(static_cast<Eigen::Index>(i));
  }

  // (action_dim x H) matrix of candidate i
  Matrix sequence(std::size_t i) const {
    Matrix seq(static_cast<Eigen::Index>(action_dim_),
               static_cast<Eigen::Index>(horizon()));
    for (std::size_t t = 0; t < horizon(); ++t) {
      seq.col(static_cast<Eigen::Index>(t)) =
          steps_[t].col(static_cast<Eigen::Index>(i));
    }
    return seq;
  }

  void set_sequence(std::size_t i, const Matrix& seq) {
    check_dim(static_cast<std::size_t>(seq.cols()), horizon(), "sequence horizon");
    check_dim(static_cast<std::size_t>(seq.rows()), action_dim_, "sequence dim");
    for (std::size_t t = 0; t < horizon(); ++t) {
      steps_[t].col(static_cast<Eigen::Index>(i)) =
          seq.col(static_cast<Eigen::Index>(t));
    }
  }

 private:
  std::size_t population_;
  std::size_t action_dim_;
  std::vector<Matrix> steps_;
};

namespace sampler_internal {

struct AxisLimits {
  double q_min, q_max, v, a, j, dt;
};

inline AxisLimits axis(const ConstraintLimits& lim, std::size_t d) {
  const auto i = static_cast<Eigen::Index>(d);
  return {lim.q_min[i], lim.q_max[i], lim.v_max[i],
          lim.a_max[i], lim.j_max[i], lim.dt};
}

// Bands on the next value x given the last three values (p3 oldest):
//   velocity      |x - p1| / dt               <= V
//   acceleration  |x - 2 p1 + p2| / dt^2      <= A
//   jerk          |x - 3 p1 + 3 p2 - p3| / dt^3 <= J
inline Interval band_interval(double p3, double p2, double p1,
                              const AxisLimits& ax) {
  const double dt = ax.dt;
  const double d1 = p1 - p2;
  const double d2 = p2 - p3;
  const double v_half = ax.v * dt;
  const double a_center = p1 + d1;
  const double a_half = ax.a * dt * dt;
  const double j_center = p1 + d1 + (d1 - d2);
  const double j_half = ax.j * dt * dt * dt;

  const double lo = std::max({ax.q_min, p1 - v_half, a_center - a_half,
                              j_center - j_half});
  const double hi = std::min({ax.q_max, p1 + v_half, a_center + a_half,
                              j_center + j_half});
  if (lo <= hi) return {lo, hi, false};

  // keep position and velocity, drop acceleration and jerk
  const double flo = std::max(ax.q_min, p1 - v_half);
  const double fhi = std::min(ax.q_max, p1 + v_half);
  if (flo <= fhi) return {flo, fhi, true};
  const double x = std::clamp(p1, ax.q_min, ax.q_max);
  return {x, x, true};
}

// Braking acceleration magnitude c such that holding -c for one step and
// then ramping back to zero at the jerk limit brings velocity w exactly to
// zero. u = J*dt is the per-step acceleration change.
inline double braking_magnitude(double w, double dt, double u, double a_max) {
  if (!(u > 0.0)) return 0.0;
  if (std::isinf(u)) return w / dt;
  for (long n = 0; n < 1000000; ++n) {
    const double nd = static_cast<double>(n);
    const double c = (w / dt + u * nd * (nd + 1.0) / 2.0) / (nd + 1.0);
    if (c < (nd + 1.0) * u) return c;
    if (c > a_max) return a_max;
  }
  return a_max;
}

// One step of the reference braking policy: drive velocity to zero as fast
// as the velocity/acceleration/jerk bands allow. nullopt when the bands
// admit no acceleration at all. Position bounds are not applied here.
inline std::optional<double> braking_step(double p3, double p2, double p1,
                                          const AxisLimits& ax) {
  const double dt = ax.dt;
  const double v0 = (p1 - p2) / dt;
  const double acc0 = ((p1 - p2) - (p2 - p3)) / (dt * dt);
  const double u = ax.j * dt;

  double target = 0.0;
  if (v0 > 0.0) {
    target = -braking_magnitude(v0, dt, u, ax.a);
  } else if (v0 < 0.0) {
    target = braking_magnitude(-v0, dt, u, ax.a);
  }

  double lo = std::max({acc0 - u, -ax.a, (-ax.v - v0) / dt});
  double hi = std::min({acc0 + u, ax.a, (ax.v - v0) / dt});
  if (lo > hi) {
    // absorb rounding in the finite differences
    const double slack = 1e-9 * (1.0 + std::abs(lo) + std::abs(hi));
    if (lo - hi > slack) return std::nullopt;
    lo = hi = 0.5 * (lo + hi);
  }
  const double c = std::clamp(target, lo, hi);
  return p1 + (v0 + c * dt) * dt;
}

// True when the braking policy brings the axis to rest without leaving
// [q_min, q_max]. Resting is then feasible forever, so this certifies that
// the history (p3, p2, p1) has a feasible continuation.
inline bool can_stop(double p3, double p2, double p1, const AxisLimits& ax) {
  constexpr int kMaxSteps = 4096;
  constexpr double kRestVelocity = 1e-10;
  constexpr double kRestAccel = 1e-8;
  for (int k = 0; k < kMaxSteps; ++k) {
    if (p1 < ax.q_min || p1 > ax.q_max) return false;
    const double v0 = (p1 - p2) / ax.dt;
    const double acc0 = ((p1 - p2) - (p2 - p3)) / (ax.dt * ax.dt);
    if (std::abs(v0) <= kRestVelocity && std::abs(acc0) <= kRestAccel) {
      return true;
    }
    const std::optional<double> next = braking_step(p3, p2, p1, ax);
    if (!next) return false;
    p3 = p2;
    p2 = p1;
    p1 = *next;
  }
  return false;
}

// Draws the next value of one axis: uniform over the part of the band
// interval from which the axis can still be stopped inside its limits.
inline double sample_axis(double p3, double p2, double p1, const AxisLimits& ax,
                          Rng& rng) {
  constexpr int kBisectionIters = 12;
  constexpr int kAttempts = 4;

  const Interval band = band_interval(p3, p2, p1, ax);
  if (!(band.hi > band.lo)) return band.lo;

  const std::optional<double> brake = braking_step(p3, p2, p1, ax);
  if (!brake || *brake < band.lo - 1e-12 || *brake > band.hi + 1e-12 ||
      !can_stop(p2, p1, std::clamp(*brake, band.lo, band.hi), ax)) {
    // history with no certified continuation: plain band sampling
    return band.lo + uniform01(rng) * band.width();
  }
  const double safe = std::clamp(*brake, band.lo, band.hi);

  double hi = band.hi;
  if (!can_stop(p2, p1, hi, ax)) {
    double ok = safe, bad = hi;
    for (int k = 0; k < kBisectionIters; ++k) {
      const double mid = 0.5 * (ok + bad);
      (can_stop(p2, p1, mid, ax) ? ok : bad) = mid;
    }
    hi = ok;
  }
  double lo = band.lo;
  if (!can_stop(p2, p1, lo, ax)) {
    double ok = safe, bad = lo;
    for (int k = 0; k < kBisectionIters; ++k) {
      const double mid = 0.5 * (ok + bad);
      (can_stop(p2, p1, mid, ax) ? ok : bad) = mid;
    }
    lo = ok;
  }

  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const double x = lo + uniform01(rng) * (hi - lo);
    if (can_stop(p2, p1, x, ax)) return x;
  }
  return safe;
}

}  // namespace sampler_internal

// Intersection of the position band and the velocity, acceleration and jerk
// bands implied by the history. If empty, the acceleration and jerk bands
// are dropped (position and velocity take priority) and `fallback` is set.
inline Interval feasible_interval(const ActionHistory& hist,
                                  const ConstraintLimits& lim, std::size_t dim) {
  if (dim >= lim.dims()) throw DimensionError("feasible_interval: bad dim");
  check_dim(hist.dims(), lim.dims(), "action history");
  const auto i = static_cast<Eigen::Index>(dim);
  return sampler_internal::band_interval(hist.third_last()[i],
                                         hist.second_last()[i], hist.last()[i],
                                         sampler_internal::axis(lim, dim));
}

// Samples n_pop sequences of h actions continuing `hist`. In constrained
// mode every step is drawn uniformly from the subset of its feasible
// interval that keeps the sequence continuable, so all four constraint
// families hold along the whole sequence. Candidate i uses its own stream
// derived from (seed, i).
inline SequenceBatch sample_sequences(const ActionHistory& hist,
                                      const ConstraintLimits& lim,
                                      std::size_t h, std::size_t n_pop,
                                      std::uint64_t seed,
                                      SamplingMode mode = SamplingMode::kConstrained) {
  lim.validate();
  check_dim(hist.dims(), lim.dims(), "action history");
  if (h < 1) throw ConfigError("sample_sequences: horizon must be >= 1");
  if (n_pop < 1) throw ConfigError("sample_sequences: population must be >= 1");

  const std::size_t dims = lim.dims();
  SequenceBatch out(h, n_pop, dims);
  for (std::size_t i = 0; i < n_pop; ++i) {
    Rng rng(derive_seed(seed, i));
    const auto col = static_cast<Eigen::Index>(i);
    for (std::size_t d = 0; d < dims; ++d) {
      const auto r = static_cast<Eigen::Index>(d);
      const sampler_internal::AxisLimits ax = sampler_internal::axis(lim, d);
      double p3 = hist.third_last()[r];
      double p2 = hist.second_last()[r];
      double p1 = hist.last()[r];
      for (std::size_t t = 0; t < h; ++t) {
        double x;
        if (mode == SamplingMode::kUniform) {
          x = ax.q_min + uniform01(rng) * (ax.q_max - ax.q_min);
        } else {
          x = sampler_internal::sample_axis(p3, p2, p1, ax, rng);
        }
        out.step(t)(r, col) = x;
        p3 = p2;
        p2 = p1;
        p1 = x;
      }
    }
  }
  return out;
}

// ----- independent checker ----- //

enum class ViolationKind { kPosition, kVelocity, kAcceleration, kJerk };

inline std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kPosition: return "position";
    case ViolationKind::kVelocity: return "velocity";
    case ViolationKind::kAcceleration: return "acceleration";
    case ViolationKind::kJerk: return "jerk";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::size_t step;  // index into the sequence
  std::size_t dim;
  double value;
  double limit;
};

// Recomputes q, V, A, J by backward differences over hist ++ seq (seq is
// action_dim x H) and reports every window that exceeds a limit. The only
// slack is the floating-point evaluation error of the differences.
inline std::vector<Violation> check_sequence(const Matrix& seq,
                                             const ActionHistory& hist,
                                             const ConstraintLimits& lim) {
  check_dim(static_cast<std::size_t>(seq.rows()), lim.dims(), "sequence dims");
  check_dim(hist.dims(), lim.dims(), "action history");
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double dt = lim.dt;
  std::vector<Violation> out;

  for (std::size_t d = 0; d < lim.dims(); ++d) {
    const auto r = static_cast<Eigen::Index>(d);
    std::vector<double> x = {hist.third_last()[r], hist.second_last()[r],
                             hist.last()[r]};
    for (Eigen::Index t = 0; t < seq.cols(); ++t) x.push_back(seq(r, t));

    for (std::size_t k = 3; k < x.size(); ++k) {
      const std::size_t step = k - 3;
      const double mag = std::max({std::abs(x[k]), std::abs(x[k - 1]),
                                   std::abs(x[k - 2]), std::abs(x[k - 3]),
                                   1e-300});
      auto exceeds = [&](double value, double limit, double coef_sum,
                         double scale) {
        if (std::isinf(limit)) return false;
        const double tol = 1e-12 * limit + 16.0 * kEps * coef_sum * mag / scale;
        return std::abs(value) > limit + tol;
      };

      if (x[k] < lim.q_min[r] || x[k] > lim.q_max[r]) {
        out.push_back({ViolationKind::kPosition, step, d, x[k],
                       x[k] < lim.q_min[r] ? lim.q_min[r] : lim.q_max[r]});
      }
      const double vel = (x[k] - x[k - 1]) / dt;
      if (exceeds(vel, lim.v_max[r], 2.0, dt)) {
        out.push_back({ViolationKind::kVelocity, step, d, vel, lim.v_max[r]});
      }
      const double acc = (x[k] - 2.0 * x[k - 1] + x[k - 2]) / (dt * dt);
      if (exceeds(acc, lim.a_max[r], 4.0, dt * dt)) {
        out.push_back({ViolationKind::kAcceleration, step, d, acc, lim.a_max[r]});
      }
      const double jerk =
          (x[k] - 3.0 * x[k - 1] + 3.0 * x[k - 2] - x[k - 3]) / (dt * dt * dt);
      if (exceeds(jerk, lim.j_max[r], 8.0, dt * dt * dt)) {
        out.push_back({ViolationKind::kJerk, step, d, jerk, lim.j_max[r]});
      }
    }
  }
  return out;
}

}  // namespace mbmrl

#endif  // MBMRL_SAMPLER_SAMPLER_HPP_
