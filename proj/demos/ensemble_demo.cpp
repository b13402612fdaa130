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


// Small j sweep over a soluble ensemble: median P_soln and cost per schedule.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "qsat/qsat.hpp"

int main(int argc, char **argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 10;
  const int count = argc > 2 ? std::atoi(argv[2]) : 30;
  if (n < 3 || n > 20 || count < 1) {
    std::fprintf(stderr, "usage: ensemble_demo [n in 3..20] [count]\n");
    return 2;
  }
  const auto insts = qsat::generate_soluble_ensemble(n, count, qsat::EnsembleRule{}, 42);

  struct Row {
    const char *name;
    qsat::Schedule sched;
  };
  const std::vector<Row> rows = {
      {"linear j=n", qsat::linear_adiabatic(n)},
      {"linear j=n^2", qsat::linear_adiabatic(n * n)},
      {"cubic j=n", qsat::cubic_schedule(n)},
      {"heuristic j=n", qsat::heuristic_preset(n)},
  };
  std::printf("n=%d, %d instances\n%-16s %10s %10s\n", n, count, "schedule", "P_soln", "cost");
  for (const auto &row : rows) {
    std::vector<double> p, c;
    for (const auto &inst : insts) {
      const auto r = qsat::run_schedule(inst, qsat::unweighted(n), row.sched);
      p.push_back(r.p_soln);
      c.push_back(r.cost);
    }
    std::printf("%-16s %10.4f %10.1f\n", row.name, qsat::median(p), qsat::median(c));
  }
  return 0;
}
