/*
 * Copyright 2026 The qsat Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef QSAT_STATS_HPP
#define QSAT_STATS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "qsat/errors.hpp"

namespace qsat {

struct MedianCI {
  double median = std::nan("");
  double lo = std::nan("");
  double hi = std::nan("");
  bool interval_defined = false; ///< false when N is too small for the level
  std::size_t lower_rank = 0;    ///< 1-based order statistic of lo
  std::size_t upper_rank = 0;    ///< 1-based order statistic of hi
};

/// P(X <= x) for X ~ Binomial(N, 1/2).
inline double binomial_half_cdf(std::size_t N, long x) {
  if (x < 0)
    return 0.0;
  if (static_cast<std::size_t>(x) >= N)
    return 1.0;
  const double lnN = std::lgamma(static_cast<double>(N) + 1.0);
  const double ln_half_n = static_cast<double>(N) * std::log(0.5);
  double acc = 0.0;
  for (long i = 0; i <= x; ++i)
    acc += std::exp(lnN - std::lgamma(i + 1.0) -
                    std::lgamma(static_cast<double>(N - i) + 1.0) + ln_half_n);
  return std::min(acc, 1.0);
}

/// Sample median with a distribution-free confidence interval from order
/// statistics: [x_(l), x_(N+1-l)] with the largest l whose binomial(N, 1/2)
/// coverage 1 - 2 P(X <= l-1) is at least `level`.
inline MedianCI median_ci(std::span<const double> values, double level = 0.95) {
  if (values.empty())
    throw ArgumentError("median of an empty sample");
  if (!(level > 0.0 && level < 1.0))
    throw ArgumentError("confidence level must lie in (0, 1)");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t N = v.size();
  MedianCI out;
  out.median = N % 2 == 1 ? v[N / 2] : 0.5 * (v[N / 2 - 1] + v[N / 2]);
  out.lo = out.hi = out.median;
  std::size_t best = 0;
  for (std::size_t l = 1; 2 * l <= N; ++l) {
    const double coverage = 1.0 - 2.0 * binomial_half_cdf(N, static_cast<long>(l) - 1);
    if (coverage >= level)
      best = l;
    else
      break;
  }
  if (best > 0) {
    out.interval_defined = true;
    out.lower_rank = best;
    out.upper_rank = N + 1 - best;
    out.lo = v[out.lower_rank - 1];
    out.hi = v[out.upper_rank - 1];
  }
  return out;
}

inline double median(std::span<const double> values) { return median_ci(values).median; }

/// ln(y) ~ a + b x by least squares; residual is the sum of squared
/// residuals in log space.
struct Fit {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;
};

namespace detail {
inline Fit log_linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw ArgumentError("fit inputs differ in length");
  if (xs.size() < 3)
    throw ArgumentError("fit needs at least 3 points");
  const double N = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  std::vector<double> ly(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (!(ys[i] > 0.0) || !std::isfinite(ys[i]))
      throw ArgumentError("fit values must be positive and finite");
    ly[i] = std::log(ys[i]);
    sx += xs[i];
    sy += ly[i];
  }
  const double mx = sx / N, my = sy / N;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0)
    throw ArgumentError("fit abscissae are all equal");
  Fit f;
  f.b = sxy / sxx;
  f.a = my - f.b * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ly[i] - (f.a + f.b * xs[i]);
    f.residual += r * r;
  }
  return f;
}
} // namespace detail

/// y ~ exp(a + b n).
inline Fit fit_exponential(std::span<const double> ns, std::span<const double> ys) {
  return detail::log_linear_fit(ns, ys);
}

/// y ~ exp(a) n^b.
inline Fit fit_powerlaw(std::span<const double> ns, std::span<const double> ys) {
  std::vector<double> ln(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0))
      throw ArgumentError("power-law fit needs positive abscissae");
    ln[i] = std::log(ns[i]);
  }
  return detail::log_linear_fit(ln, ys);
}

} // namespace qsat

#endif // QSAT_STATS_HPP
