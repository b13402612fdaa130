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
#include <set>

#include "oracles.hpp"
#include "qsat/qsat.hpp"

using namespace qsat;

namespace {

// v1 OR NOT v2, v2 OR v3 (variables 0-based).
Instance two_clause() {
  Instance inst;
  inst.n = 3;
  inst.k = 2;
  inst.clauses = {Clause{{0, 1}, {false, true}}, Clause{{1, 2}, {false, false}}};
  return inst;
}

std::uint64_t bits(bool v1, bool v2, bool v3) {
  return (v1 ? 1U : 0U) | (v2 ? 2U : 0U) | (v3 ? 4U : 0U);
}

} // namespace

TEST(Cost, TwoClauseExamples) {
  const auto inst = two_clause();
  EXPECT_EQ(cost(inst, {bits(false, false, true)}), 0);
  EXPECT_EQ(cost(inst, {bits(false, true, false)}), 1);
  EXPECT_EQ(cost(inst, {bits(false, false, false)}), 1);
}

TEST(Cost, OutOfRangeAssignmentThrows) {
  const auto inst = two_clause();
  EXPECT_THROW(cost(inst, {8}), ArgumentError);
}

TEST(Cost, TableMatchesLiteralLoop) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto inst = generate_instance(9, 3, 38, rng);
    const auto table = cost_table(inst);
    for (std::uint64_t s = 0; s < inst.states(); ++s) {
      ASSERT_EQ(table[s], oracle::brute_cost(inst, s));
      ASSERT_EQ(cost(inst, {s}), oracle::brute_cost(inst, s));
    }
  }
}

TEST(Cost, MeanOverAssignmentsIsMOver2ToK) {
  for (int k = 1; k <= 4; ++k) {
    Rng rng(100 + k);
    const auto inst = generate_instance(10, k, 37, rng);
    const auto table = cost_table(inst);
    std::uint64_t total = 0;
    for (auto c : table)
      total += c;
    EXPECT_EQ(total, inst.m() * (std::uint64_t{1} << (inst.n - k)));
  }
}

TEST(Cost, SingleFlipChangesByAtMostOccurrences) {
  Rng rng(5);
  const auto inst = generate_instance(8, 3, 34, rng);
  const auto table = cost_table(inst);
  std::vector<int> occ(inst.n, 0);
  for (const auto &cl : inst.clauses)
    for (int v : cl.vars)
      ++occ[v];
  for (std::uint64_t s = 0; s < inst.states(); ++s)
    for (int i = 0; i < inst.n; ++i) {
      const int d = std::abs(int(table[s]) - int(table[s ^ (std::uint64_t{1} << i)]));
      ASSERT_LE(d, occ[i]);
    }
}

TEST(Solve, TwoClauseHasFourSolutions) {
  auto inst = two_clause();
  const auto &sols = enumerate_solutions(inst);
  EXPECT_EQ(sols.size(), 4U);
  EXPECT_EQ(sols, oracle::brute_solutions(inst));
  EXPECT_TRUE(std::is_sorted(sols.begin(), sols.end()));
  EXPECT_TRUE(inst.solutions.has_value());
}

TEST(Solve, ContradictionHasNone) {
  Instance inst;
  inst.n = 1;
  inst.k = 1;
  inst.clauses = {Clause{{0}, {false}}, Clause{{0}, {true}}};
  EXPECT_TRUE(enumerate_solutions(inst).empty());
}

TEST(Solve, NoClausesAllAssignments) {
  Instance inst;
  inst.n = 2;
  inst.k = 1;
  EXPECT_EQ(enumerate_solutions(inst), (std::vector<std::uint64_t>{0, 1, 2, 3}));
}

TEST(Solve, AgreesWithBruteForceOnRandomInstances) {
  for (int n = 3; n <= 11; ++n) {
    auto inst = generate_instance(n, EnsembleRule{}, 42, 0);
    EXPECT_EQ(enumerate_solutions(inst), oracle::brute_solutions(inst)) << "n=" << n;
  }
}

TEST(Solve, OverLimitThrows) {
  Instance inst;
  inst.n = kEnumerateLimit + 1;
  inst.k = 1;
  EXPECT_THROW(enumerate_solutions(inst), CapabilityError);
}

TEST(Solve, UnsolvedInstanceRefusesSolutionList) {
  EXPECT_THROW(two_clause().solution_list(), StateError);
}

TEST(Generate, ClauseCountAtTwenty) {
  EnsembleRule rule;
  EXPECT_EQ(rule.clauses_for(20, 0), 85);
  EXPECT_EQ(rule.clauses_for(20, 1), 85);
  EXPECT_EQ(generate_instance(20, rule, 1, 3).m(), 85U);
}

TEST(Generate, AlternatingClauseCountAtTen) {
  EnsembleRule rule;
  int low = 0, high = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto m = generate_instance(10, rule, 9, i).m();
    ASSERT_TRUE(m == 42 || m == 43);
    (m == 42 ? low : high)++;
  }
  EXPECT_EQ(low, 50);
  EXPECT_EQ(high, 50);
}

TEST(Generate, ShapeOfSmallInstance) {
  Rng rng(3);
  const auto inst = generate_instance(3, 2, 2, rng);
  ASSERT_EQ(inst.m(), 2U);
  for (const auto &cl : inst.clauses) {
    ASSERT_EQ(cl.width(), 2U);
    EXPECT_NE(cl.vars[0], cl.vars[1]);
    for (int v : cl.vars) {
      EXPECT_GE(v, 0);
      EXPECT_LT(v, 3);
    }
  }
}

TEST(Generate, WidthAboveNThrows) {
  Rng rng(1);
  EXPECT_THROW(generate_instance(2, 3, 1, rng), ArgumentError);
}

TEST(Generate, DeterministicAndOrderIndependent) {
  EnsembleRule rule;
  const auto a = generate_instance(12, rule, 77, 5);
  const auto b = generate_instance(12, rule, 77, 5);
  EXPECT_EQ(a, b);
  // Drawing other samples first does not change sample 5.
  (void)generate_instance(12, rule, 77, 4);
  EXPECT_EQ(generate_instance(12, rule, 77, 5), a);
  EXPECT_NE(generate_instance(12, rule, 78, 5).clauses, a.clauses);
}

TEST(Generate, LiteralStatistics) {
  // Negation probability 1/2 and uniform variable choice, within 5 sigma.
  Rng rng(2024);
  const auto inst = generate_instance(10, 3, 20000, rng);
  long neg = 0;
  std::vector<long> occ(10, 0);
  for (const auto &cl : inst.clauses)
    for (std::size_t i = 0; i < 3; ++i) {
      neg += cl.negated[i];
      ++occ[cl.vars[i]];
    }
  const double lits = 60000.0;
  EXPECT_NEAR(neg / lits, 0.5, 5 * std::sqrt(0.25 / lits));
  for (long o : occ)
    EXPECT_NEAR(o / lits, 0.1, 5 * std::sqrt(0.09 / lits));
}

TEST(Generate, NoDuplicateClausesWhenDisallowed) {
  Rng rng(8);
  const auto inst = generate_instance(4, 3, 30, rng, false);
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (const auto &cl : inst.clauses)
    EXPECT_TRUE(seen.emplace(cl.mask(), cl.falsifying_pattern()).second);
}

TEST(Ensemble, AllRetainedInstancesSoluble) {
  const auto ens = generate_soluble_ensemble(12, 100, EnsembleRule{}, 7);
  ASSERT_EQ(ens.size(), 100U);
  for (const auto &inst : ens) {
    ASSERT_FALSE(inst.solution_list().empty());
    for (auto s : inst.solution_list())
      ASSERT_EQ(oracle::brute_cost(inst, s), 0);
  }
}

TEST(Ensemble, RetainedFractionAtTwentyIsStrictlyBetweenZeroAndOne) {
  EnsembleRule rule;
  int soluble = 0;
  const int draws = 24;
  for (int i = 0; i < draws; ++i) {
    auto inst = generate_instance(20, rule, 5, static_cast<std::uint64_t>(i));
    soluble += enumerate_solutions(inst).empty() ? 0 : 1;
  }
  EXPECT_GT(soluble, 0);
  EXPECT_LT(soluble, draws);
}

TEST(Ensemble, EmptyClauseRuleRetainsFirstAttempt) {
  EnsembleRule rule;
  rule.k = 1;
  rule.m = 0;
  for (const auto &inst : generate_soluble_ensemble(2, 10, rule, 1)) {
    EXPECT_EQ(inst.meta->attempt, 0U);
    EXPECT_EQ(inst.solution_list().size(), 4U);
  }
}

TEST(Ensemble, RejectsEmptyCount) {
  EXPECT_THROW(generate_soluble_ensemble(5, 0, EnsembleRule{}, 1), ArgumentError);
}

TEST(Rng, BelowIsInRangeAndCoversValues) {
  Rng rng(11);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto x = rng.below(7);
    ASSERT_LT(x, 7U);
    ++hits[x];
  }
  for (int h : hits)
    EXPECT_GT(h, 800);
}

TEST(Rng, SubstreamsDiffer) {
  EXPECT_NE(Rng::substream(1, 0)(), Rng::substream(1, 1)());
  EXPECT_EQ(Rng::substream(1, 2, 3)(), Rng::substream(1, 2, 3)());
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}
