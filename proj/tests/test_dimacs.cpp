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

#include "qsat/qsat.hpp"

using namespace qsat;

namespace {

Instance two_clause() {
  Instance inst;
  inst.n = 3;
  inst.k = 2;
  inst.clauses = {Clause{{0, 1}, {false, true}}, Clause{{1, 2}, {false, false}}};
  return inst;
}

std::size_t error_line(const std::string &text) {
  try {
    read_dimacs(text);
  } catch (const ParseError &e) {
    return e.line();
  }
  return 0;
}

} // namespace

TEST(Dimacs, WritesConventionalBody) {
  const auto text = write_dimacs(two_clause());
  EXPECT_NE(text.find("c qsat: k=2\n"), std::string::npos);
  EXPECT_NE(text.find("p cnf 3 2\n1 -2 0\n2 3 0\n"), std::string::npos);
}

TEST(Dimacs, RoundTripRandomInstances) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto inst = generate_instance(5 + static_cast<int>(i % 8), EnsembleRule{}, 3, i);
    enumerate_solutions(inst);
    std::size_t count = 0;
    const auto back = read_dimacs(write_dimacs(inst), &count);
    EXPECT_EQ(back.n, inst.n);
    EXPECT_EQ(back.k, inst.k);
    EXPECT_EQ(back.clauses, inst.clauses);
    EXPECT_EQ(back.meta, inst.meta);
    EXPECT_EQ(count, inst.solution_list().size());
    EXPECT_EQ(instance_id(back), instance_id(inst));
  }
}

TEST(Dimacs, LiteralOutOfRangeReportsLine) {
  EXPECT_EQ(error_line("p cnf 3 2\n4 0\n1 2 0\n"), 2U);
}

TEST(Dimacs, MalformedInputs) {
  EXPECT_EQ(error_line("c hello\np cnf x 2\n"), 2U);
  EXPECT_EQ(error_line("1 2 0\n"), 1U);
  EXPECT_EQ(error_line("p cnf 3 1\np cnf 3 1\n"), 2U);
  EXPECT_EQ(error_line("p cnf 3 1\n1 1 0\n"), 2U);
  EXPECT_EQ(error_line("p cnf 3 2\n1 2 0\n1 2 3 0\n"), 3U);
  EXPECT_EQ(error_line("p cnf 3 1\n1 2\n"), 2U);
  EXPECT_GT(error_line("p cnf 3 2\n1 2 0\n"), 0U);
  EXPECT_EQ(error_line("c qsat: mu=abc\np cnf 3 0\n"), 1U);
  EXPECT_GT(error_line(""), 0U);
}

TEST(Dimacs, AcceptsSplitClausesAndComments) {
  const auto inst = read_dimacs("c plain comment\np cnf 3 2\n1\n-2 0 2 3\n0\n%\n");
  ASSERT_EQ(inst.m(), 2U);
  EXPECT_EQ(inst.clauses, two_clause().clauses);
}

TEST(Manifest, RecordRoundTrip) {
  auto inst = generate_instance(8, EnsembleRule{}, 12, 4);
  enumerate_solutions(inst);
  const auto rec = manifest_record(inst, "x.cnf");
  const nlohmann::json j = rec;
  for (const char *key : {"n", "m", "k", "seed", "solution_count", "path"})
    EXPECT_TRUE(j.contains(key)) << key;
  const auto back = j.get<ManifestRecord>();
  EXPECT_EQ(back.id, rec.id);
  EXPECT_EQ(back.solution_count, inst.solution_list().size());
  EXPECT_EQ(back.m, static_cast<int>(inst.m()));
  EXPECT_EQ(back.path, "x.cnf");
}
