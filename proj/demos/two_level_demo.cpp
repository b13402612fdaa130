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


// Two-level example: a large constant step size makes the stepped evolution
// leave the ground state, even with many steps.

#include <cstdio>

#include "qsat/qsat.hpp"

int main() {
  const auto inst = qsat::two_level_example();
  const auto w = qsat::unweighted(1);
  std::printf("%8s %12s %12s\n", "j", "delta=1", "delta=4");
  for (int j = 1; j <= 4096; j *= 4) {
    const double p1 = qsat::run_schedule(inst, w, qsat::constant_delta(j, 1.0)).p_soln;
    const double p4 = qsat::run_schedule(inst, w, qsat::constant_delta(j, 4.0)).p_soln;
    std::printf("%8d %12.6f %12.6f\n", j, p1, p4);
  }

  const auto tr = qsat::adiabatic_trace(inst, w, qsat::constant_delta(64, 4.0));
  std::printf("\ndelta=4, j=64: followed level %d of 2, final P_soln %.6f\n", tr.followed_level + 1,
              tr.p_soln);
  for (const auto &warn : tr.warnings)
    std::printf("  %s\n", warn.c_str());
  return 0;
}
