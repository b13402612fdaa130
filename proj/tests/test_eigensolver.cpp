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

#include <random>

#include <Eigen/Dense>

#include "qsat/qsat.hpp"

using namespace qsat;

namespace {

Eigen::MatrixXd random_symmetric(Eigen::Index N, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(N, N);
  for (Eigen::Index r = 0; r < N; ++r)
    for (Eigen::Index c = 0; c < N; ++c)
      A(r, c) = g(gen);
  return 0.5 * (A + A.transpose());
}

Eigen::VectorXd dense_lowest(const Eigen::MatrixXd &A, int L) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(L);
}

} // namespace

TEST(Eigensolver, RandomDenseOperator) {
  const auto A = random_symmetric(400, 1);
  auto apply = [&](const Eigen::MatrixXd &X, Eigen::MatrixXd &Y) { Y = A * X; };
  const auto r = lowest_eigenpairs(apply, 400, 5);
  const auto expect = dense_lowest(A, 5);
  for (int a = 0; a < 5; ++a)
    EXPECT_NEAR(r.values(a), expect(a), 1e-8);
  const Eigen::MatrixXd gram = r.vectors.transpose() * r.vectors;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(5, 5)).norm(), 1e-10);
  EXPECT_GT(r.matvecs, 0);
}

TEST(Eigensolver, SmallProblemsGoDense) {
  const auto A = random_symmetric(20, 2);
  auto apply = [&](const Eigen::MatrixXd &X, Eigen::MatrixXd &Y) { Y = A * X; };
  const auto r = lowest_eigenpairs(apply, 20, 3);
  EXPECT_EQ(r.matvecs, 20);
  const auto expect = dense_lowest(A, 3);
  for (int a = 0; a < 3; ++a)
    EXPECT_NEAR(r.values(a), expect(a), 1e-12);
}

TEST(Eigensolver, DegenerateCluster) {
  // Hamming-cube Laplacian-like operator at f = 0: levels 0, 1 (x10), 2 (x45).
  const auto w = unweighted(10);
  CostTable zero(1024, 0);
  HamiltonianOperator op(zero, w);
  op.set_f(0.0);
  EigenOptions eo;
  eo.block = 14;
  const auto r = lowest_eigenpairs(op, op.dim(), 11, eo);
  EXPECT_NEAR(r.values(0), 0.0, 1e-9);
  for (int a = 1; a < 11; ++a)
    EXPECT_NEAR(r.values(a), 1.0, 1e-9) << a;
}

TEST(Eigensolver, HamiltonianWithAndWithoutPreconditioner) {
  const auto inst = generate_soluble_instance(10, EnsembleRule{}, 3, 0);
  const auto costs = cost_table(inst);
  const auto w = unweighted(10);
  const auto dense = [&](double f) { return dense_lowest(build_hamiltonian(costs, w, f), 4); };
  HamiltonianOperator op(costs, w);
  HamiltonianPreconditioner pre(costs, w);
  for (double f : {0.1, 0.5, 0.8, 0.97}) {
    op.set_f(f);
    pre.set_f(f);
    const auto expect = dense(f);
    const Eigen::MatrixXd seed = pre.initial_block(6);
    const auto a = lowest_eigenpairs(op, op.dim(), 4, {}, &seed, pre);
    const auto b = lowest_eigenpairs(op, op.dim(), 4);
    for (int l = 0; l < 4; ++l) {
      EXPECT_NEAR(a.values(l), expect(l), 1e-8) << f;
      EXPECT_NEAR(b.values(l), expect(l), 1e-8) << f;
    }
  }
}

TEST(Eigensolver, WarmStartReusesVectors) {
  const auto A = random_symmetric(300, 5);
  auto apply = [&](const Eigen::MatrixXd &X, Eigen::MatrixXd &Y) { Y = A * X; };
  const auto cold = lowest_eigenpairs(apply, 300, 3);
  const auto warm = lowest_eigenpairs(apply, 300, 3, {}, &cold.vectors);
  EXPECT_LT(warm.matvecs, cold.matvecs);
  for (int a = 0; a < 3; ++a)
    EXPECT_NEAR(warm.values(a), cold.values(a), 1e-8);
}

TEST(Eigensolver, BadArguments) {
  auto apply = [](const Eigen::MatrixXd &X, Eigen::MatrixXd &Y) { Y = X; };
  EXPECT_THROW(lowest_eigenpairs(apply, 10, 0), ArgumentError);
  EXPECT_THROW(lowest_eigenpairs(apply, 10, 11), ArgumentError);
}

TEST(Eigensolver, NonConvergenceCarriesContext) {
  const auto A = random_symmetric(500, 7);
  auto apply = [&](const Eigen::MatrixXd &X, Eigen::MatrixXd &Y) { Y = A * X; };
  EigenOptions eo;
  eo.max_iterations = 2;
  eo.tag = 0.42;
  try {
    lowest_eigenpairs(apply, 500, 4, eo);
    FAIL() << "expected a numerical error";
  } catch (const NumericalError &e) {
    EXPECT_EQ(e.f(), 0.42);
    EXPECT_EQ(e.iterations(), 2U);
  }
}
