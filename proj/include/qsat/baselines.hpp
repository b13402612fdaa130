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


#ifndef QSAT_BASELINES_HPP
#define QSAT_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "qsat/errors.hpp"
#include "qsat/rng.hpp"
#include "qsat/sat.hpp"

namespace qsat {

struct GsatConfig {
  long max_flips_per_try = 0; ///< 0 = n (restart after n flips)
  long max_tries = 0;         ///< 0 = 1000 n
  std::uint64_t seed = 1;
  bool record_flips = false;
};

struct GsatFlip {
  std::uint64_t before = 0; ///< assignment the flip was chosen from
  int var = 0;
  int cost_after = 0;
};

struct GsatResult {
  bool found = false;
  std::uint64_t solution = 0;
  long total_flips = 0;
  long tries = 0;
  std::vector<GsatFlip> log; ///< only with record_flips
};

/// Greedy local search with restarts. Each try starts from a uniformly random
/// assignment and repeatedly flips a variable whose flip gives the lowest
/// cost (ties broken uniformly; sideways and uphill moves allowed). Flips are
/// counted across tries until the first solution.
inline GsatResult gsat_solve(const Instance &inst, const GsatConfig &cfg) {
  const int n = inst.n;
  const long flips_per_try = cfg.max_flips_per_try > 0 ? cfg.max_flips_per_try : n;
  const long max_tries = cfg.max_tries > 0 ? cfg.max_tries : 1000L * n;
  Rng rng(cfg.seed);
  GsatResult res;

  // occurrences[v] = (clause, literal is negated)
  std::vector<std::vector<std::pair<int, bool>>> occ(n);
  for (std::size_t c = 0; c < inst.m(); ++c)
    for (std::size_t i = 0; i < inst.clauses[c].width(); ++i)
      occ[inst.clauses[c].vars[i]].emplace_back(static_cast<int>(c),
                                                inst.clauses[c].negated[i]);
  std::vector<int> true_lits(inst.m());
  std::vector<int> delta(n);
  std::vector<int> ties;

  for (long t = 0; t < max_tries; ++t) {
    ++res.tries;
    std::uint64_t s = n == 64 ? rng() : rng() & ((std::uint64_t{1} << n) - 1);
    int cost = 0;
    for (std::size_t c = 0; c < inst.m(); ++c) {
      const auto &cl = inst.clauses[c];
      int tl = 0;
      for (std::size_t i = 0; i < cl.width(); ++i)
        tl += (((s >> cl.vars[i]) & 1U) != 0) != cl.negated[i];
      true_lits[c] = tl;
      cost += tl == 0;
    }
    for (long flip = 0;; ++flip) {
      if (cost == 0) {
        res.found = true;
        res.solution = s;
        return res;
      }
      if (flip == flips_per_try)
        break;
      // Cost change of flipping v: clauses it breaks minus clauses it makes.
      int best = std::numeric_limits<int>::max();
      ties.clear();
      for (int v = 0; v < n; ++v) {
        int d = 0;
        const bool val = ((s >> v) & 1U) != 0;
        for (auto [c, neg] : occ[v]) {
          const bool lit_true = val != neg;
          if (lit_true)
            d += true_lits[c] == 1;
          else
            d -= true_lits[c] == 0;
        }
        delta[v] = d;
        if (d < best) {
          best = d;
          ties.clear();
        }
        if (d == best)
          ties.push_back(v);
      }
      const int v = ties[rng.below(ties.size())];
      const std::uint64_t before = s;
      const bool val = ((s >> v) & 1U) != 0;
      for (auto [c, neg] : occ[v])
        true_lits[c] += (val != neg) ? -1 : 1;
      s ^= std::uint64_t{1} << v;
      cost += delta[v];
      ++res.total_flips;
      if (cfg.record_flips)
        res.log.push_back({before, v, cost});
    }
  }
  return res;
}

struct GsatCost {
  double mean_flips = 0.0;
  int censored = 0; ///< trials that exhausted max_tries
};

/// Mean flips to the first solution over `trials` independently seeded
/// runs. An exhausted trial contributes max_tries * max_flips_per_try.
inline GsatCost gsat_expected_cost(const Instance &inst, const GsatConfig &cfg, int trials) {
  if (trials < 1)
    throw ArgumentError("trials must be >= 1");
  const long flips_per_try = cfg.max_flips_per_try > 0 ? cfg.max_flips_per_try : inst.n;
  const long max_tries = cfg.max_tries > 0 ? cfg.max_tries : 1000L * inst.n;
  GsatCost out;
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    GsatConfig c = cfg;
    c.seed = Rng::substream(cfg.seed, static_cast<std::uint64_t>(t))();
    c.record_flips = false;
    const auto r = gsat_solve(inst, c);
    if (r.found) {
      total += static_cast<double>(r.total_flips);
    } else {
      total += static_cast<double>(max_tries) * static_cast<double>(flips_per_try);
      ++out.censored;
    }
  }
  out.mean_flips = total / trials;
  return out;
}

namespace detail {
inline double grover_angle(int n, double S) {
  if (!(S >= 1.0))
    throw ArgumentError("unstructured search needs at least one solution");
  const double N = std::ldexp(1.0, n);
  if (S > N)
    throw ArgumentError("solution count exceeds 2^n");
  return std::asin(std::sqrt(S / N));
}
} // namespace detail

/// Success probability after t Grover iterations: sin^2((2t+1) theta) with
/// sin(theta) = sqrt(S / 2^n).
inline double grover_success_prob(int n, double S, double t) {
  if (t < 0.0)
    throw ArgumentError("iteration count must be nonnegative");
  const double theta = detail::grover_angle(n, S);
  const double s = std::sin((2.0 * t + 1.0) * theta);
  return s * s;
}

/// Iteration count maximizing the success probability, floor(pi / (4 theta)).
inline long grover_optimal_iterations(int n, double S) {
  return static_cast<long>(std::floor(std::numbers::pi / (4.0 * detail::grover_angle(n, S))));
}

/// Expected total Grover iterations for search with an unknown number of
/// solutions. Stage i draws an iteration count uniformly from
/// {0, ..., ceil(m_i) - 1}, measures, and stops on success; m_1 = 1 and
/// m_{i+1} = min(6/5 m_i, sqrt(2^n)). The stage success probability is
/// (1/M) sum_{t<M} sin^2((2t+1) theta) = 1/2 - sin(4 M theta) / (4 M sin 2 theta),
/// so the expectation is a closed-form series; once m is capped the tail is
/// geometric.
inline double grover_expected_cost(int n, double S, double growth = 6.0 / 5.0) {
  const double theta = detail::grover_angle(n, S);
  const double cap = std::sqrt(std::ldexp(1.0, n));
  auto stage_success = [&](double M) {
    const double s2 = std::sin(2.0 * theta);
    if (s2 < 1e-300) // theta = pi/2: every iteration count succeeds
      return 1.0;
    return 0.5 - std::sin(4.0 * M * theta) / (4.0 * M * s2);
  };
  double reach = 1.0; // probability the stage is reached
  double expected = 0.0;
  double m = 1.0;
  for (int stage = 0; stage < 100000; ++stage) {
    const double M = std::ceil(m - 1e-12);
    const double p = std::clamp(stage_success(M), 0.0, 1.0);
    const double mean_iters = 0.5 * (M - 1.0);
    if (m >= cap) {
      // Stationary stage: geometric number of repetitions.
      if (p <= 0.0)
        return std::numeric_limits<double>::infinity();
      return expected + reach * mean_iters / p;
    }
    expected += reach * mean_iters;
    reach *= 1.0 - p;
    if (reach < 1e-300)
      return expected;
    m = std::min(growth * m, cap);
  }
  return expected;
}

} // namespace qsat

#endif // QSAT_BASELINES_HPP
