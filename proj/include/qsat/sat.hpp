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


#ifndef QSAT_SAT_HPP
#define QSAT_SAT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "qsat/errors.hpp"
#include "qsat/rng.hpp"

namespace qsat {

/// Largest n for which exhaustive enumeration is attempted.
inline constexpr int kEnumerateLimit = 30;
/// Largest n for which a full cost table is materialized.
inline constexpr int kCostTableLimit = 26;

/// A truth assignment. Bit i of `index` is the value of variable i (1 = true).
struct Assignment {
  std::uint64_t index = 0;

  bool value(int var) const noexcept { return ((index >> var) & 1U) != 0; }
  friend bool operator==(Assignment, Assignment) = default;
};

/// Disjunction of k literals over distinct variables.
struct Clause {
  std::vector<int> vars;       ///< 0-based variable indices
  std::vector<bool> negated;   ///< true: literal is NOT vars[i]

  std::size_t width() const noexcept { return vars.size(); }

  /// Bits of the clause's variables.
  std::uint64_t mask() const noexcept {
    std::uint64_t m = 0;
    for (int v : vars)
      m |= std::uint64_t{1} << v;
    return m;
  }
  /// Values of the clause's variables under which every literal is false.
  std::uint64_t falsifying_pattern() const noexcept {
    std::uint64_t p = 0;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (negated[i])
        p |= std::uint64_t{1} << vars[i];
    return p;
  }
  bool satisfied_by(std::uint64_t s) const noexcept {
    return (s & mask()) != falsifying_pattern();
  }

  friend bool operator==(const Clause &, const Clause &) = default;
};

/// Provenance of a generated instance.
struct InstanceMeta {
  std::uint64_t seed = 0;
  std::uint64_t sample = 0;  ///< slot index within the ensemble
  std::uint64_t attempt = 0; ///< draws rejected before this one (soluble filter)
  double mu = 0.0;

  friend bool operator==(const InstanceMeta &, const InstanceMeta &) = default;
};

/// A k-SAT problem: n variables and m clauses of width k.
struct Instance {
  int n = 0;
  int k = 0;
  std::vector<Clause> clauses;
  std::optional<std::vector<std::uint64_t>> solutions; ///< ascending
  std::optional<InstanceMeta> meta;

  std::size_t m() const noexcept { return clauses.size(); }
  std::uint64_t states() const noexcept { return std::uint64_t{1} << n; }

  const std::vector<std::uint64_t> &solution_list() const {
    if (!solutions)
      throw StateError("instance has not been solved");
    return *solutions;
  }

  friend bool operator==(const Instance &, const Instance &) = default;
};

/// Number of clauses falsified by `s`.
inline int cost(const Instance &inst, Assignment s) {
  if (inst.n < 0 || inst.n > 63 || (s.index >> inst.n) != 0)
    throw ArgumentError("assignment index " + std::to_string(s.index) +
                        " out of range for n=" + std::to_string(inst.n));
  int c = 0;
  for (const auto &cl : inst.clauses)
    c += cl.satisfied_by(s.index) ? 0 : 1;
  return c;
}

/// Cost of every assignment, indexed by assignment.
using CostTable = std::vector<std::uint16_t>;

/// Builds the cost table clause by clause: each clause adds 1 to the
/// 2^(n-k) assignments that match its falsifying pattern.
inline CostTable cost_table(const Instance &inst) {
  if (inst.n > kCostTableLimit)
    throw CapabilityError("cost table limited to n <= " +
                          std::to_string(kCostTableLimit));
  if (inst.m() > 0xFFFF)
    throw CapabilityError("cost table limited to 65535 clauses");
  const std::uint64_t all = inst.states() - 1;
  CostTable table(inst.states(), 0);
  for (const auto &cl : inst.clauses) {
    const std::uint64_t free = all & ~cl.mask();
    const std::uint64_t pattern = cl.falsifying_pattern();
    // Enumerate all subsets of `free`.
    std::uint64_t sub = 0;
    do {
      ++table[sub | pattern];
      sub = (sub - free) & free;
    } while (sub != 0);
  }
  return table;
}

/// How many clauses each sample of an ensemble gets.
struct EnsembleRule {
  int k = 3;
  double mu = 4.25;              ///< clause ratio m/n (used when m < 0)
  int m = -1;                    ///< fixed clause count, overrides mu when >= 0
  bool allow_duplicate_clauses = true;

  /// Clause count for sample `sample` at size n. A non-integer mu*n
  /// alternates floor(mu*n) (even samples) and floor(mu*n)+1 (odd samples).
  int clauses_for(int n, std::uint64_t sample) const {
    if (m >= 0)
      return m;
    const double target = mu * n;
    const double base = std::floor(target + 1e-9);
    if (std::abs(target - base) < 1e-9)
      return static_cast<int>(base);
    return static_cast<int>(base) + static_cast<int>(sample % 2);
  }
};

namespace detail {

inline Clause random_clause(int n, int k, Rng &rng) {
  // Partial Fisher-Yates over the variable indices.
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i)
    pool[i] = i;
  Clause cl;
  cl.vars.reserve(k);
  cl.negated.reserve(k);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
    cl.vars.push_back(pool[i]);
    cl.negated.push_back(rng.coin());
  }
  return cl;
}

} // namespace detail

/// Draws m random clauses of width k over n variables. Each clause picks k
/// distinct variables uniformly and negates each with probability 1/2.
inline Instance generate_instance(int n, int k, int m, Rng &rng,
                                  bool allow_duplicate_clauses = true) {
  if (n < 1 || n > 63)
    throw ArgumentError("n must be in [1, 63]");
  if (k < 1 || k > n)
    throw ArgumentError("clause width k=" + std::to_string(k) +
                        " must be in [1, n=" + std::to_string(n) + "]");
  if (m < 0)
    throw ArgumentError("clause count must be nonnegative");
  Instance inst;
  inst.n = n;
  inst.k = k;
  inst.clauses.reserve(m);
  while (static_cast<int>(inst.clauses.size()) < m) {
    auto cl = detail::random_clause(n, k, rng);
    if (!allow_duplicate_clauses) {
      auto key = [](const Clause &c) {
        return std::make_pair(c.mask(), c.falsifying_pattern());
      };
      const auto kc = key(cl);
      const bool dup = std::any_of(inst.clauses.begin(), inst.clauses.end(),
                                   [&](const Clause &o) { return key(o) == kc; });
      if (dup)
        continue;
    }
    inst.clauses.push_back(std::move(cl));
  }
  return inst;
}

/// Sample `sample` of the ensemble defined by (rule, seed) at size n.
inline Instance generate_instance(int n, const EnsembleRule &rule,
                                  std::uint64_t seed, std::uint64_t sample,
                                  std::uint64_t attempt = 0) {
  auto rng = Rng::substream(seed, static_cast<std::uint64_t>(n) << 40 | sample,
                            attempt);
  const int m = rule.clauses_for(n, sample);
  if (m < 0)
    throw ArgumentError("ensemble rule resolves to a negative clause count");
  auto inst = generate_instance(n, rule.k, m, rng, rule.allow_duplicate_clauses);
  inst.meta = InstanceMeta{seed, sample, attempt, rule.m >= 0 ? 0.0 : rule.mu};
  return inst;
}

/// All zero-cost assignments in ascending order. Also stores them in
/// `inst.solutions`.
inline const std::vector<std::uint64_t> &enumerate_solutions(Instance &inst) {
  if (inst.n > kEnumerateLimit)
    throw CapabilityError("exhaustive solve limited to n <= " +
                          std::to_string(kEnumerateLimit));
  std::vector<std::uint64_t> sols;
  if (inst.n <= kCostTableLimit) {
    const auto table = cost_table(inst);
    for (std::uint64_t s = 0; s < table.size(); ++s)
      if (table[s] == 0)
        sols.push_back(s);
  } else {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> lits;
    for (const auto &cl : inst.clauses)
      lits.emplace_back(cl.mask(), cl.falsifying_pattern());
    for (std::uint64_t s = 0; s < inst.states(); ++s) {
      bool ok = true;
      for (const auto &[mask, pat] : lits)
        if ((s & mask) == pat) {
          ok = false;
          break;
        }
      if (ok)
        sols.push_back(s);
    }
  }
  inst.solutions = std::move(sols);
  return *inst.solutions;
}

/// `count` soluble instances at size n. Slot i keeps drawing attempts
/// (substream (seed, n, i, attempt)) until one has a solution, so each
/// retained instance depends only on (seed, n, i).
/// Sample `sample` of the soluble ensemble: the first attempt with at least
/// one solution, solved.
inline Instance generate_soluble_instance(int n, const EnsembleRule &rule, std::uint64_t seed,
                                          std::uint64_t sample) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto inst = generate_instance(n, rule, seed, sample, attempt);
    if (!enumerate_solutions(inst).empty())
      return inst;
  }
}

inline std::vector<Instance> generate_soluble_ensemble(int n, int count,
                                                       const EnsembleRule &rule,
                                                       std::uint64_t seed) {
  if (count < 1)
    throw ArgumentError("ensemble count must be >= 1");
  std::vector<Instance> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(generate_soluble_instance(n, rule, seed, static_cast<std::uint64_t>(i)));
  return out;
}

/// Stable identifier used to join result rows with instance manifests.
inline std::string instance_id(const Instance &inst) {
  const auto meta = inst.meta.value_or(InstanceMeta{});
  char buf[64];
  std::snprintf(buf, sizeof buf, "n%02d-s%llu-i%05llu", inst.n,
                static_cast<unsigned long long>(meta.seed),
                static_cast<unsigned long long>(meta.sample));
  return buf;
}

} // namespace qsat

#endif // QSAT_SAT_HPP
