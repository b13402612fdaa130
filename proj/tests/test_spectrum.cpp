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

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "qsat/qsat.hpp"

using namespace qsat;

namespace {

constexpr double pi = std::numbers::pi;

Instance soluble(int n, std::uint64_t sample, std::uint64_t seed = 17) {
  return generate_soluble_instance(n, EnsembleRule{}, seed, sample);
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i)
    b = b * (n - k + i) / i;
  return b;
}

} // namespace

TEST(Hamiltonian, MatchesElementwiseDefinition) {
  const auto inst = soluble(6, 0);
  const auto w = unweighted(6);
  for (double f : {0.0, 0.35, 1.0}) {
    const Eigen::MatrixXd expect =
        (1.0 - f) * oracle::mixing(w.w) + f * oracle::cost_diag(inst);
    EXPECT_LT((build_hamiltonian(inst, w, f) - expect).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Hamiltonian, BinomialSpectrumAtZero) {
  const int n = 6;
  const auto inst = soluble(n, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(inst, unweighted(n), 0.0));
  int idx = 0;
  for (int level = 0; level <= n; ++level)
    for (int c = 0; c < static_cast<int>(binomial(n, level)); ++c)
      EXPECT_NEAR(es.eigenvalues()(idx++), level, 1e-12);
}

TEST(Hamiltonian, DenseLimit) {
  const auto inst = generate_instance(13, EnsembleRule{}, 1, 0);
  EXPECT_THROW(build_hamiltonian(inst, unweighted(13), 0.5), CapabilityError);
}

TEST(Hamiltonian, OperatorMatchesDense) {
  const auto inst = soluble(7, 2);
  const auto costs = cost_table(inst);
  const auto w = make_weights(inst, WeightMode::unweighted);
  HamiltonianOperator op(costs, w);
  op.set_f(0.4);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(128, 128);
  Eigen::MatrixXd Y;
  op(I, Y);
  EXPECT_LT((Y - build_hamiltonian(costs, w, 0.4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Spectrum, IterativeMatchesDense) {
  for (int n : {9, 10}) {
    const auto inst = soluble(n, 0);
    GapOptions dense_opts, iter_opts;
    dense_opts.dense_max_n = 12;
    iter_opts.dense_max_n = 0;
    SpectrumSolver dense(inst, unweighted(n), dense_opts), iter(inst, unweighted(n), iter_opts);
    for (double f : {0.05, 0.3, 0.6, 0.9}) {
      const auto a = dense.solve(f);
      const auto b = iter.solve(f);
      ASSERT_EQ(a.values.size(), b.values.size());
      for (std::size_t l = 0; l < a.values.size(); ++l)
        EXPECT_NEAR(a.values[l], b.values[l], 1e-8) << n << " " << f << " " << l;
      EXPECT_NEAR(a.gap, b.gap, 1e-8);
      EXPECT_NEAR(a.expected_cost_ground, b.expected_cost_ground, 1e-6);
    }
  }
}

TEST(Spectrum, GapIsOneAtZero) {
  for (int n : {6, 10}) {
    const auto inst = soluble(n, 3);
    const auto pt = SpectrumSolver(inst, unweighted(n)).solve(0.0);
    EXPECT_NEAR(pt.values[0], 0.0, 1e-9);
    EXPECT_NEAR(pt.gap, 1.0, 1e-8);
  }
}

TEST(Spectrum, GroundCostAtZeroIsClauseAverage) {
  for (int n : {8, 10, 12}) {
    const auto inst = soluble(n, 4);
    const double expect = static_cast<double>(inst.m()) / 8.0;
    const auto pt = SpectrumSolver(inst, unweighted(n)).solve(0.0);
    EXPECT_NEAR(pt.expected_cost_ground, expect, 1e-9) << n;
  }
  EXPECT_DOUBLE_EQ(85.0 / 8.0, 10.625);
}

TEST(Spectrum, SolutionLevelsVanishAtOne) {
  const auto inst = soluble(8, 5);
  const auto S = inst.solution_list().size();
  const auto pt = SpectrumSolver(inst, unweighted(8)).solve(1.0);
  for (std::size_t a = 0; a < S; ++a)
    EXPECT_NEAR(pt.values[a], 0.0, 1e-12);
  EXPECT_NEAR(pt.values[S], 1.0, 1e-12);
  EXPECT_NEAR(pt.expected_cost_ground, 0.0, 1e-12);
}

TEST(Spectrum, ExpectedCostOfBasisState) {
  const auto inst = soluble(6, 6);
  const auto costs = cost_table(inst);
  for (std::size_t s : {0UL, 17UL, 63UL}) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(64);
    e(static_cast<Eigen::Index>(s)) = 1.0;
    EXPECT_DOUBLE_EQ(expected_cost(e, costs), oracle::brute_cost(inst, s));
  }
}

TEST(Spectrum, RulesAgreeNearOne) {
  const auto inst = soluble(8, 7);
  GapOptions a, b;
  b.rule = GapRule::overlap;
  b.levels = static_cast<int>(inst.solution_list().size()) + 2;
  const auto pa = SpectrumSolver(inst, unweighted(8), a).solve(0.995);
  const auto pb = SpectrumSolver(inst, unweighted(8), b).solve(0.995);
  EXPECT_NEAR(pa.gap, pb.gap, 1e-12);
}

TEST(Spectrum, ProfileRefinesAroundMinimum) {
  const auto inst = soluble(8, 8);
  const auto prof = gap_profile(inst, unweighted(8));
  EXPECT_EQ(prof.refinement_depth, 3);
  EXPECT_GT(prof.points.size(), 101U);
  for (std::size_t i = 1; i < prof.points.size(); ++i)
    ASSERT_GT(prof.points[i].f, prof.points[i - 1].f);
  double lowest = 1e9;
  for (const auto &p : prof.points) {
    if (p.gap_defined()) {
      EXPECT_GT(p.gap, 0.0);
      lowest = std::min(lowest, p.gap);
    }
    for (std::size_t l = 1; l < p.values.size(); ++l)
      EXPECT_GE(p.values[l], p.values[l - 1] - 1e-12);
  }
  EXPECT_EQ(prof.min_gap, lowest);
  // The refined minimum can only improve on the coarse grid.
  auto coarse = gap_profile(inst, unweighted(8), uniform_f_grid(), GapOptions{.refine_rounds = 0});
  EXPECT_LE(prof.min_gap, coarse.min_gap);
  EXPECT_GT(prof.f_star, 0.0);
  EXPECT_LT(prof.f_star, 1.0);
  EXPECT_TRUE(gap_discontinuities(prof).empty());
}

TEST(Spectrum, IterativeProfileMatchesDense) {
  const auto inst = soluble(9, 9);
  GapOptions iter;
  iter.dense_max_n = 0;
  iter.refine_factor = 4;
  GapOptions dense = iter;
  dense.dense_max_n = 12;
  const auto grid = uniform_f_grid(21);
  const auto a = gap_profile(inst, unweighted(9), grid, iter);
  const auto b = gap_profile(inst, unweighted(9), grid, dense);
  EXPECT_NEAR(a.min_gap, b.min_gap, 1e-8);
  EXPECT_NEAR(a.f_star, b.f_star, 1e-12);
}

TEST(Spectrum, ProfileCsvLayout) {
  const auto inst = soluble(6, 10);
  GapOptions o;
  o.levels = 3;
  o.refine_rounds = 0;
  SpectrumSolver solver(inst, unweighted(6), o);
  const auto prof = solver.profile(uniform_f_grid(5));
  std::ostringstream os;
  write_profile_csv(os, prof);
  const int L = prof.levels;
  std::string header = "f";
  for (int a = 1; a <= L; ++a)
    header += ",eigenvalue_" + std::to_string(a);
  for (int a = 1; a <= L; ++a)
    header += ",overlap_" + std::to_string(a);
  header += ",gap,expected_cost_ground";
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, header);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2 * L + 2);
  }
  EXPECT_EQ(rows, 5);
}

TEST(Spectrum, NeedsSolutionsAndTwoLevels) {
  auto inst = soluble(6, 11);
  GapOptions o;
  o.levels = 1;
  EXPECT_THROW(SpectrumSolver(inst, unweighted(6), o), ArgumentError);
  inst.solutions.reset();
  EXPECT_THROW(SpectrumSolver(inst, unweighted(6)), StateError);
}

TEST(TwoLevel, Matrices) {
  const auto inst = two_level_example();
  const auto h0 = mixing_hamiltonian(unweighted(1));
  EXPECT_EQ(h0(0, 0), 0.5);
  EXPECT_EQ(h0(0, 1), -0.5);
  EXPECT_EQ(h0(1, 1), 0.5);
  const auto hc = cost_table(inst);
  EXPECT_EQ(hc[0], 0);
  EXPECT_EQ(hc[1], 2);
}

TEST(Eigenphases, TwoLevelAtEndpoints) {
  const auto h0 = mixing_hamiltonian(unweighted(1));
  const std::vector<double> hc{0.0, 2.0};
  const auto p0 = step_eigenphases(h0, hc, 0.0, 4.0);
  ASSERT_EQ(p0.theta.size(), 2U);
  EXPECT_NEAR(p0.theta[0], 4.0 - 2.0 * pi, 1e-12);
  EXPECT_NEAR(p0.theta[1], 0.0, 1e-12);
  EXPECT_NEAR(4.0 - 2.0 * pi, -2.283, 1e-3);
  for (double delta : {0.5, 1.0, 2.5}) {
    const auto p1 = step_eigenphases(h0, hc, 1.0, delta);
    std::vector<double> expect{wrap_phase(0.0), wrap_phase(2.0 * delta)};
    std::sort(expect.begin(), expect.end());
    EXPECT_NEAR(p1.theta[0], expect[0], 1e-12);
    EXPECT_NEAR(p1.theta[1], expect[1], 1e-12);
  }
}

TEST(Eigenphases, UnitModulusAndCompleteBasis) {
  const auto inst = soluble(6, 12);
  const auto costs = cost_table(inst);
  const std::vector<double> hc(costs.begin(), costs.end());
  const auto h0 = mixing_hamiltonian(unweighted(6));
  const auto U = step_unitary(h0, hc, 0.7, 0.5);
  const auto pt = unitary_eigenphases(U);
  for (Eigen::Index r = 0; r < 64; ++r) {
    const Eigen::VectorXcd e = pt.vectors.col(r);
    const Eigen::VectorXcd Ue = U * e;
    const std::complex<double> lambda = std::polar(1.0, -pt.theta[r]);
    EXPECT_LT((Ue - lambda * e).norm(), 1e-10);
    EXPECT_GT(pt.theta[r], -pi);
    EXPECT_LE(pt.theta[r], pi);
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Random(64);
  psi.normalize();
  const double total = (pt.vectors.adjoint() * psi).squaredNorm();
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Eigenphases, SmallDeltaFollowsHamiltonian) {
  const auto h0 = mixing_hamiltonian(unweighted(1));
  const std::vector<double> hc{0.0, 2.0};
  for (double f : {0.2, 0.5, 0.8}) {
    Eigen::MatrixXd H = (1 - f) * h0;
    H(1, 1) += 2 * f;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const auto small = step_eigenphases(h0, hc, f, 1e-3);
    EXPECT_NEAR(small.theta[0] / 1e-3, es.eigenvalues()(0), 1e-3);
    EXPECT_NEAR(small.theta[1] / 1e-3, es.eigenvalues()(1), 1e-3);
  }
}

TEST(AdiabaticTrace, TwoLevelLimits) {
  const auto inst = two_level_example();
  const auto w = unweighted(1);
  const auto good = adiabatic_trace(inst, w, constant_delta(4096, 1.0));
  EXPECT_GT(good.p_soln, 0.99);
  EXPECT_GT(good.overlap.back()[good.followed_level], 0.99);
  EXPECT_GT(good.final_solution_weight[good.followed_level], 0.99);
  const auto bad = adiabatic_trace(inst, w, constant_delta(4096, 4.0));
  EXPECT_LT(bad.p_soln, 0.05);
  EXPECT_LT(bad.final_solution_weight[bad.followed_level], 0.05);
}

TEST(AdiabaticTrace, MatchesKernelRun) {
  const auto inst = soluble(6, 13);
  const auto w = unweighted(6);
  const auto s = linear_adiabatic(40);
  const auto tr = adiabatic_trace(inst, w, s);
  const auto r = run_schedule(inst, w, s);
  EXPECT_NEAR(tr.p_soln, r.p_soln, 1e-10);
  for (const auto &ov : tr.overlap) {
    double sum = 0.0;
    for (double x : ov)
      sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(AdiabaticTrace, WrapRequiresLargeSpread) {
  for (std::uint64_t i = 0; i < 4; ++i) {
    const auto inst = soluble(5, i);
    const auto h0 = mixing_hamiltonian(unweighted(5));
    const auto costs = cost_table(inst);
    const std::vector<double> hc(costs.begin(), costs.end());
    for (double delta : {0.05, 0.3, 1.0, 4.0}) {
      const auto s = constant_delta(30, delta);
      const auto tr = adiabatic_trace(h0, hc, inst.solution_list(), s);
      const bool any = std::any_of(tr.wrapped.begin(), tr.wrapped.end(), [](bool b) { return b; });
      if (any)
        EXPECT_GT(phase_spread_bound(h0, hc, s), pi) << i << " " << delta;
    }
  }
}

TEST(AdiabaticTrace, CapabilityLimit) {
  const auto inst = soluble(11, 0);
  EXPECT_THROW(adiabatic_trace(inst, unweighted(11), linear_adiabatic(4)), CapabilityError);
}
