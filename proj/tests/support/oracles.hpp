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

// Reference implementations used only by tests. Each one is written from the
// defining formula with plain loops and shares no code path with the library
// routine it checks.

#ifndef MBMRL_TESTS_SUPPORT_ORACLES_HPP_
#define MBMRL_TESTS_SUPPORT_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major, rows of equal length

// ----- networks ----- //

// Dense ReLU net read from the documented flat layout: per layer, the
// (out x in) weight column-major, then the bias.
struct Net {
  std::vector<std::size_t> sizes;  // input, hidden..., output
  Vec flat;
};

inline std::size_t net_params(const std::vector<std::size_t>& sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    n += sizes[l] * sizes[l + 1] + sizes[l + 1];
  }
  return n;
}

inline Vec net_forward(const Net& net, const Vec& x) {
  Vec a = x;
  std::size_t off = 0;
  const std::size_t layers = net.sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = net.sizes[l], out = net.sizes[l + 1];
    Vec z(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double s = 0.0;
      for (std::size_t i = 0; i < in; ++i) s += net.flat[off + i * out + o] * a[i];
      z[o] = s + net.flat[off + in * out + o];
      if (l + 1 < layers) z[o] = std::max(z[o], 0.0);
    }
    off += in * out + out;
    a = std::move(z);
  }
  return a;
}

// mean over samples and output dims
inline double net_mse(const Net& net, const Mat& xs, const Mat& ys) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < xs.size(); ++b) {
    const Vec y = net_forward(net, xs[b]);
    for (std::size_t k = 0; k < y.size(); ++k) {
      s += (y[k] - ys[b][k]) * (y[k] - ys[b][k]);
      ++n;
    }
  }
  return s / static_cast<double>(n);
}

// central differences of f around p
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, Vec p, double h) {
  Vec g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + h;
    const double up = f(p);
    p[i] = keep - h;
    const double dn = f(p);
    p[i] = keep;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor)
inline double max_rel_error(const Vec& a, const Vec& b, double floor) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / den);
  }
  return worst;
}

// ----- optimizer ----- //

// Adam on scalars, textbook form with bias correction.
struct ScalarAdam {
  double lr, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double x, double g) {
    ++t;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double mh = m / (1.0 - std::pow(b1, t));
    const double vh = v / (1.0 - std::pow(b2, t));
    return x - lr * mh / (std::sqrt(vh) + eps);
  }
};

// ----- action constraints ----- //

struct AxisBounds {
  double q_lo, q_hi, v, a, j, dt;
};

// Counts limit breaches of the signal x (history included at the front)
// using long double differences. Each window starting at index `first` is
// checked. The allowance only absorbs double rounding of the stored values.
inline std::size_t count_violations(const std::vector<double>& x, std::size_t first,
                                    const AxisBounds& b, std::string* what = nullptr) {
  using LD = long double;
  std::size_t bad = 0;
  const LD dt = b.dt;
  auto over = [](LD value, double limit, LD mag, LD scale) {
    if (std::isinf(limit)) return false;
    const LD slack = 1e-12L * limit + 64.0L * std::numeric_limits<double>::epsilon() * mag / scale;
    return std::fabs(value) > static_cast<LD>(limit) + slack;
  };
  for (std::size_t k = std::max<std::size_t>(first, 3); k < x.size(); ++k) {
    const LD x0 = x[k], x1 = x[k - 1], x2 = x[k - 2], x3 = x[k - 3];
    const LD mag = std::max({std::fabs(x0), std::fabs(x1), std::fabs(x2), std::fabs(x3),
                             static_cast<LD>(1e-300)});
    const LD vel = (x0 - x1) / dt;
    const LD acc = (x0 - 2 * x1 + x2) / (dt * dt);
    const LD jerk = (x0 - 3 * x1 + 3 * x2 - x3) / (dt * dt * dt);
    auto note = [&](const char* kind, LD val) {
      ++bad;
      if (what && what->empty()) {
        *what = std::string(kind) + " at " + std::to_string(k) + " = " +
                std::to_string(static_cast<double>(val));
      }
    };
    if (x[k] < b.q_lo || x[k] > b.q_hi) note("position", x0);
    if (over(vel, b.v, mag, dt)) note("velocity", vel);
    if (over(acc, b.a, mag, dt * dt)) note("acceleration", acc);
    if (over(jerk, b.j, mag, dt * dt * dt)) note("jerk", jerk);
  }
  return bad;
}

// ----- planning ----- //

// sum_t gamma^(t-1) r_t by explicit powers
inline double discounted(const Vec& r, double gamma) {
  double s = 0.0;
  for (std::size_t t = 0; t < r.size(); ++t) s += std::pow(gamma, static_cast<double>(t)) * r[t];
  return s;
}

// Brute-force planner for the scalar integrator s' = s + a with reward
// -(s' - v_des)^2 - w_u (a - a_prev)^2. Returns the first index attaining
// the maximum return.
inline std::size_t brute_force_argmax(const Mat& seqs, double s0, double a_prev,
                                      double v_des, double w_u, double gamma,
                                      Vec* returns = nullptr) {
  std::size_t best = 0;
  double best_ret = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    double s = s0, prev = a_prev;
    Vec r;
    for (double a : seqs[i]) {
      s = s + a;
      r.push_back(-(s - v_des) * (s - v_des) - w_u * (a - prev) * (a - prev));
      prev = a;
    }
    const double ret = discounted(r, gamma);
    if (returns) returns->push_back(ret);
    if (ret > best_ret) {
      best_ret = ret;
      best = i;
    }
  }
  return best;
}

// ----- linear systems ----- //

// s_t = A^t s_0 + sum_{k<t} A^(t-1-k) (p B u_k + f), by matrix powers.
inline Mat linear_closed_form(const Mat& A, const Mat& B, const Vec& f, double p,
                              const Vec& s0, const Mat& us) {
  const std::size_t n = A.size();
  auto matvec = [&](const Mat& M, const Vec& v) {
    Vec out(M.size(), 0.0);
    for (std::size_t r = 0; r < M.size(); ++r) {
      for (std::size_t c = 0; c < v.size(); ++c) out[r] += M[r][c] * v[c];
    }
    return out;
  };
  auto matmul = [&](const Mat& X, const Mat& Y) {
    Mat out(n, Vec(n, 0.0));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t k = 0; k < n; ++k) out[r][c] += X[r][k] * Y[k][c];
    return out;
  };
  Mat eye(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) eye[i][i] = 1.0;
  std::vector<Mat> pow = {eye};
  for (std::size_t t = 1; t <= us.size(); ++t) pow.push_back(matmul(pow.back(), A));

  Mat out;
  for (std::size_t t = 1; t <= us.size(); ++t) {
    Vec s = matvec(pow[t], s0);
    for (std::size_t k = 0; k < t; ++k) {
      Vec drive = matvec(B, us[k]);
      for (std::size_t i = 0; i < n; ++i) drive[i] = p * drive[i] + f[i];
      const Vec term = matvec(pow[t - 1 - k], drive);
      for (std::size_t i = 0; i < n; ++i) s[i] += term[i];
    }
    out.push_back(s);
  }
  return out;
}

// ----- statistics ----- //

inline double mean(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double var(const Vec& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Welch statistic and Welch-Satterthwaite degrees of freedom.
inline std::pair<double, double> welch_t_df(const Vec& a, const Vec& b) {
  const double va = var(a) / static_cast<double>(a.size());
  const double vb = var(b) / static_cast<double>(b.size());
  const double t = (mean(a) - mean(b)) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) /
                    (va * va / static_cast<double>(a.size() - 1) +
                     vb * vb / static_cast<double>(b.size() - 1));
  return {t, df};
}

}  // namespace oracle

#endif  // MBMRL_TESTS_SUPPORT_ORACLES_HPP_
