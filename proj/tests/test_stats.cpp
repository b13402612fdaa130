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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qsat/qsat.hpp"

using namespace qsat;

namespace {

// Binomial(N, 1/2) point masses by Pascal's rule.
std::vector<double> half_binomial(std::size_t N) {
  std::vector<double> row{1.0};
  for (std::size_t r = 0; r < N; ++r) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (std::size_t i = 0; i < row.size(); ++i) {
      next[i] += 0.5 * row[i];
      next[i + 1] += 0.5 * row[i];
    }
    row = std::move(next);
  }
  return row;
}

// Largest l with P(l <= X <= N - l) >= level, scanning every l; 0 if none.
std::size_t brute_rank(std::size_t N, double level) {
  const auto p = half_binomial(N);
  std::size_t best = 0;
  for (std::size_t l = 1; 2 * l <= N; ++l) {
    double inside = 0.0;
    for (std::size_t i = l; i <= N - l; ++i)
      inside += p[i];
    if (inside >= level - 1e-12)
      best = l;
  }
  return best;
}

} // namespace

TEST(Median, OddAndEven) {
  const std::vector<double> five{5, 1, 4, 2, 3};
  EXPECT_EQ(median(five), 3.0);
  const std::vector<double> four{4, 1, 3, 2};
  EXPECT_EQ(median(four), 2.5);
  EXPECT_THROW(median(std::vector<double>{}), ArgumentError);
}

TEST(Median, SmallSamplesHaveNoInterval) {
  for (std::size_t N = 1; N <= 5; ++N) {
    std::vector<double> v(N, 1.0);
    EXPECT_FALSE(median_ci(v).interval_defined) << N;
  }
  std::vector<double> six{1, 2, 3, 4, 5, 6};
  const auto ci = median_ci(six);
  EXPECT_TRUE(ci.interval_defined);
  EXPECT_EQ(ci.lo, 1.0);
  EXPECT_EQ(ci.hi, 6.0);
}

TEST(Median, RanksAtOneHundred) {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i)
    v[i] = 100 - i;
  const auto ci = median_ci(v);
  EXPECT_EQ(ci.lower_rank, 40U);
  EXPECT_EQ(ci.upper_rank, 61U);
  EXPECT_EQ(ci.lo, 40.0);
  EXPECT_EQ(ci.hi, 61.0);
  EXPECT_EQ(ci.median, 50.5);
}

TEST(Median, MatchesBruteForce) {
  std::mt19937_64 gen(3);
  std::lognormal_distribution<double> d(0.0, 1.5);
  for (std::size_t N : {6UL, 7UL, 10UL, 25UL, 50UL, 99UL, 100UL, 101UL, 250UL, 1000UL}) {
    for (double level : {0.9, 0.95, 0.99}) {
      std::vector<double> v(N);
      for (auto &x : v)
        x = d(gen);
      auto sorted = v;
      std::sort(sorted.begin(), sorted.end());
      const auto ci = median_ci(v, level);
      const auto l = brute_rank(N, level);
      const double med = N % 2 ? sorted[N / 2] : 0.5 * (sorted[N / 2 - 1] + sorted[N / 2]);
      EXPECT_EQ(ci.median, med);
      ASSERT_EQ(ci.interval_defined, l > 0) << N << " " << level;
      if (l > 0) {
        EXPECT_EQ(ci.lower_rank, l) << N << " " << level;
        EXPECT_EQ(ci.upper_rank, N + 1 - l);
        EXPECT_EQ(ci.lo, sorted[l - 1]);
        EXPECT_EQ(ci.hi, sorted[N - l]);
      }
    }
  }
}

TEST(Median, ConstantValuesGiveZeroWidth) {
  const std::vector<double> v(40, 7.5);
  const auto ci = median_ci(v);
  EXPECT_EQ(ci.lo, 7.5);
  EXPECT_EQ(ci.hi, 7.5);
}

TEST(Median, BadLevel) {
  const std::vector<double> v{1, 2, 3};
  EXPECT_THROW(median_ci(v, 0.0), ArgumentError);
  EXPECT_THROW(median_ci(v, 1.0), ArgumentError);
}

TEST(Fit, RecoversPlantedExponential) {
  std::vector<double> ns, ys;
  for (int n = 10; n <= 30; n += 2) {
    ns.push_back(n);
    ys.push_back(std::exp(0.32 * n));
  }
  const auto f = fit_exponential(ns, ys);
  EXPECT_NEAR(f.b, 0.32, 1e-12);
  EXPECT_NEAR(f.a, 0.0, 1e-11);
  EXPECT_NEAR(f.residual, 0.0, 1e-20);
}

TEST(Fit, RecoversPlantedPowerLaw) {
  std::vector<double> ns, ys;
  for (int n = 10; n <= 20; n += 2) {
    ns.push_back(n);
    ys.push_back(3.5 * std::pow(n, 2.7));
  }
  const auto f = fit_powerlaw(ns, ys);
  EXPECT_NEAR(f.b, 2.7, 1e-12);
  EXPECT_NEAR(f.a, std::log(3.5), 1e-11);
  EXPECT_GT(fit_exponential(ns, ys).residual, f.residual);
}

TEST(Fit, ResidualMatchesDirectSum) {
  const std::vector<double> ns{1, 2, 3, 4};
  const std::vector<double> ys{2.0, 3.5, 9.0, 20.0};
  const auto f = fit_exponential(ns, ys);
  double r = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double e = std::log(ys[i]) - (f.a + f.b * ns[i]);
    r += e * e;
  }
  EXPECT_NEAR(f.residual, r, 1e-14);
}

TEST(Fit, Preconditions) {
  const std::vector<double> two{1, 2};
  EXPECT_THROW(fit_exponential(two, two), ArgumentError);
  const std::vector<double> ns{1, 2, 3};
  EXPECT_THROW(fit_exponential(ns, std::vector<double>{1, 0, 2}), ArgumentError);
  EXPECT_THROW(fit_exponential(ns, std::vector<double>{1, -1, 2}), ArgumentError);
  EXPECT_THROW(fit_exponential(ns, std::vector<double>{1, 2}), ArgumentError);
  EXPECT_THROW(fit_powerlaw(std::vector<double>{0, 1, 2}, ns), ArgumentError);
  EXPECT_THROW(fit_exponential(std::vector<double>{2, 2, 2}, ns), ArgumentError);
}
