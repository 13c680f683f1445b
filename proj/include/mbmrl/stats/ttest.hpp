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

#ifndef MBMRL_STATS_TTEST_HPP_
#define MBMRL_STATS_TTEST_HPP_

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <span>
#include <string>

#include "mbmrl/common.hpp"

namespace mbmrl::stats {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
};

inline Summary summarize(std::span<const double> x) {
  Summary s;
  s.n = x.size();
  if (s.n == 0) return s;
  for (double v : x) s.mean += v;
  s.mean /= static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
  double mean_diff = 0.0;  // a - b
};

namespace internal {

inline double two_sided_p(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace internal

// Welch's unequal-variance t-test. Identical constant samples give p = 1.
inline TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ConfigError("t-test: each group needs at least 2 observations");
  }
  const Summary sa = summarize(a);
  const Summary sb = summarize(b);
  const double va = sa.sd * sa.sd / static_cast<double>(sa.n);
  const double vb = sb.sd * sb.sd / static_cast<double>(sb.n);
  TTestResult r;
  r.mean_diff = sa.mean - sb.mean;
  const double se2 = va + vb;
  if (se2 == 0.0) {
    // zero variance in both groups
    r.t = r.mean_diff == 0.0 ? 0.0 : std::copysign(kInf, r.mean_diff);
    r.df = static_cast<double>(sa.n + sb.n - 2);
    r.p = r.mean_diff == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = r.mean_diff / std::sqrt(se2);
  r.df = se2 * se2 /
         (va * va / static_cast<double>(sa.n - 1) + vb * vb / static_cast<double>(sb.n - 1));
  r.p = internal::two_sided_p(r.t, r.df);
  return r;
}

// Paired t-test on a[i] - b[i].
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("paired t-test: size mismatch");
  if (a.size() < 2) throw ConfigError("paired t-test: need at least 2 pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const Summary s = summarize(d);
  TTestResult r;
  r.mean_diff = s.mean;
  r.df = static_cast<double>(s.n - 1);
  if (s.sd == 0.0) {
    r.t = s.mean == 0.0 ? 0.0 : std::copysign(kInf, s.mean);
    r.p = s.mean == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = s.mean / (s.sd / std::sqrt(static_cast<double>(s.n)));
  r.p = internal::two_sided_p(r.t, r.df);
  return r;
}

// "*" p < 0.05, "**" p < 0.01, "***" p < 0.001.
inline std::string stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace mbmrl::stats

#endif  // MBMRL_STATS_TTEST_HPP_
