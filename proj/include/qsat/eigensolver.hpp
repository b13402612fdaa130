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


#ifndef QSAT_EIGENSOLVER_HPP
#define QSAT_EIGENSOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsat/errors.hpp"
#include "qsat/rng.hpp"

namespace qsat {

struct EigenOptions {
  int block = 0;          ///< block size, 0 = levels + 2
  int max_basis = 0;      ///< basis size before restart, 0 = max(8 * block, 48)
  /// Eigenvalue tolerance. A Ritz pair is accepted once ||r||^2 / d <= tol,
  /// d being its distance to the first unwanted Ritz value (the usual
  /// a-posteriori bound on the eigenvalue error).
  double tol = 1e-10;
  /// When positive, also require ||r|| <= vector_tol (eigenvector accuracy).
  double vector_tol = 0.0;
  int max_iterations = 5000;
  std::uint64_t seed = 0x5eed;
  double tag = 0.0;       ///< reported in errors (the f value being solved)
};

struct EigenResult {
  Eigen::VectorXd values;  ///< ascending
  Eigen::MatrixXd vectors; ///< orthonormal columns
  Eigen::VectorXd residuals;
  int iterations = 0;
  long matvecs = 0;
};

namespace detail {

/// Orthonormalizes the columns of W against Q and among themselves.
/// Columns that become numerically dependent are dropped.
inline Eigen::MatrixXd orthonormalize_against(Eigen::Ref<const Eigen::MatrixXd> Q,
                                              Eigen::MatrixXd W) {
  if (Q.cols() > 0) {
    const Eigen::VectorXd before = W.colwise().norm().transpose();
    W.noalias() -= Q * (Q.transpose() * W);
    // Second pass only when cancellation was severe.
    const Eigen::VectorXd after = W.colwise().norm().transpose();
    if (((after.array() < 0.5 * before.array())).any())
      W.noalias() -= Q * (Q.transpose() * W);
  }
  Eigen::MatrixXd out(W.rows(), W.cols());
  int kept = 0;
  for (Eigen::Index c = 0; c < W.cols(); ++c) {
    Eigen::VectorXd v = W.col(c);
    const double before = v.norm();
    if (before == 0.0)
      continue;
    for (int pass = 0; pass < 2 && kept > 0; ++pass)
      v -= out.leftCols(kept) * (out.leftCols(kept).transpose() * v);
    const double after = v.norm();
    if (after <= 1e-10 * before || after == 0.0)
      continue;
    out.col(kept++) = v / after;
  }
  out.conservativeResize(Eigen::NoChange, kept);
  return out;
}

} // namespace detail

/// Lowest `levels` eigenpairs of a real symmetric operator given only its
/// block product `apply(X, Y)` (Y = A X).
///
/// Block Davidson iteration with thick restart: the search space is extended
/// by the (optionally preconditioned) residual block of the current Ritz
/// pairs and restarted from the best 2*block Ritz vectors when full. The
/// block handles degenerate clusters up to its size. `guess` columns seed
/// the start block. `precondition(r, theta)` overwrites r with an
/// approximation of (A - theta)^{-1} r.
/// Identity preconditioner: plain block Krylov expansion.
struct NoPreconditioner {
  void operator()(Eigen::Ref<Eigen::VectorXd>, double) const {}
};

template <class Apply, class Precondition = NoPreconditioner>
EigenResult lowest_eigenpairs(Apply &&apply, Eigen::Index dim, int levels,
                              const EigenOptions &opts = {},
                              const Eigen::MatrixXd *guess = nullptr,
                              Precondition &&precondition = {}) {
  using Eigen::Index;
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  if (levels < 1 || levels > dim)
    throw ArgumentError("requested " + std::to_string(levels) +
                        " eigenpairs of a " + std::to_string(dim) +
                        "-dimensional operator");
  const Index b = std::min<Index>(opts.block > 0 ? opts.block : levels + 2, dim);
  const Index max_basis =
      std::min<Index>(opts.max_basis > 0 ? opts.max_basis : std::max<Index>(8 * b, 48), dim);
  EigenResult res;

  // Small problems: assemble the matrix and diagonalize it directly.
  if (dim <= std::max<Index>(2 * max_basis, 64)) {
    MatrixXd I = MatrixXd::Identity(dim, dim);
    MatrixXd A(dim, dim);
    apply(I, A);
    res.matvecs = dim;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()));
    res.values = es.eigenvalues().head(levels);
    res.vectors = es.eigenvectors().leftCols(levels);
    res.residuals = (A * res.vectors - res.vectors * res.values.asDiagonal())
                        .colwise()
                        .norm()
                        .transpose();
    return res;
  }

  Rng rng(opts.seed);
  MatrixXd start(dim, b);
  Index filled = 0;
  if (guess != nullptr && guess->rows() == dim) {
    filled = std::min<Index>(guess->cols(), b);
    start.leftCols(filled) = guess->leftCols(filled);
  }
  for (Index c = filled; c < b; ++c)
    for (Index r = 0; r < dim; ++r)
      start(r, c) = rng.normal();
  if (filled > 0)
    // Keep a random component so invariant subspaces of the guess can grow.
    for (Index c = 0; c < filled; ++c)
      for (Index r = 0; r < dim; ++r)
        start(r, c) += 1e-4 * rng.normal() / std::sqrt(static_cast<double>(dim));

  // Search space and its image live in preallocated storage; m columns are active.
  MatrixXd V(dim, max_basis), AV(dim, max_basis);
  Index m = 0;
  {
    const MatrixXd V0 = detail::orthonormalize_against(MatrixXd(dim, 0), start);
    m = V0.cols();
    V.leftCols(m) = V0;
    MatrixXd AV0(dim, m);
    apply(V0, AV0);
    AV.leftCols(m) = AV0;
    res.matvecs += m;
  }
  MatrixXd T = V.leftCols(m).transpose() * AV.leftCols(m);
  T = 0.5 * (T + T.transpose());

  for (int it = 1; it <= opts.max_iterations; ++it) {
    res.iterations = it;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
    const Index nr = std::min<Index>(b, m);
    const MatrixXd Y = es.eigenvectors().leftCols(nr);
    const VectorXd theta = es.eigenvalues().head(nr);
    MatrixXd X = V.leftCols(m) * Y;
    MatrixXd R = AV.leftCols(m) * Y - X * theta.asDiagonal();
    const VectorXd rnorm = R.colwise().norm().transpose();

    const Index want = std::min<Index>(levels, nr);
    const double next =
        es.eigenvalues().size() > levels ? es.eigenvalues()(levels) : theta(want - 1) + 1.0;
    auto converged = [&](Index c) {
      const double d = std::max(next - theta(c), 1e-3);
      if (rnorm(c) * rnorm(c) > opts.tol * d)
        return false;
      return opts.vector_tol <= 0.0 || rnorm(c) <= opts.vector_tol;
    };
    bool done = want == levels;
    for (Index c = 0; c < want && done; ++c)
      done = converged(c);
    if (done) {
      res.values = theta.head(levels);
      res.vectors = X.leftCols(levels);
      res.residuals = rnorm.head(levels);
      return res;
    }

    // Expansion block: residuals of the unconverged Ritz pairs in the block.
    std::vector<Index> open;
    for (Index c = 0; c < nr; ++c)
      if (c >= want || !converged(c))
        open.push_back(c);
    const auto nw = static_cast<Index>(open.size());
    MatrixXd W(dim, nw);
    for (Index i = 0; i < nw; ++i) {
      W.col(i) = R.col(open[i]);
      precondition(W.col(i), theta(open[i]));
    }

    if (m + nw > max_basis) {
      const Index keep = std::min<Index>(std::max<Index>(2 * b, levels), m);
      const MatrixXd Yk = es.eigenvectors().leftCols(keep);
      const MatrixXd Vk = V.leftCols(m) * Yk;
      const MatrixXd AVk = AV.leftCols(m) * Yk;
      V.leftCols(keep) = Vk;
      AV.leftCols(keep) = AVk;
      m = keep;
      T = es.eigenvalues().head(keep).asDiagonal();
    }

    const auto Vm = V.leftCols(m);
    MatrixXd Wn = detail::orthonormalize_against(Vm, W);
    if (Wn.cols() == 0) {
      MatrixXd rnd(dim, b);
      for (Index c = 0; c < b; ++c)
        for (Index r = 0; r < dim; ++r)
          rnd(r, c) = rng.normal();
      Wn = detail::orthonormalize_against(Vm, rnd);
      if (Wn.cols() == 0)
        throw NumericalError("eigensolver search space exhausted", opts.tag, it);
    }
    const Index mw = std::min<Index>(Wn.cols(), max_basis - m);
    MatrixXd AW(dim, mw);
    apply(Wn.leftCols(mw), AW);
    res.matvecs += mw;

    MatrixXd Tn(m + mw, m + mw);
    Tn.topLeftCorner(m, m) = T;
    Tn.topRightCorner(m, mw) = Vm.transpose() * AW;
    Tn.bottomLeftCorner(mw, m) = Tn.topRightCorner(m, mw).transpose();
    MatrixXd WtAW = Wn.leftCols(mw).transpose() * AW;
    Tn.bottomRightCorner(mw, mw) = 0.5 * (WtAW + WtAW.transpose());
    T = std::move(Tn);

    V.middleCols(m, mw) = Wn.leftCols(mw);
    AV.middleCols(m, mw) = AW;
    m += mw;
  }
  throw NumericalError("eigensolver did not converge", opts.tag,
                       static_cast<std::size_t>(opts.max_iterations));
}

} // namespace qsat

#endif // QSAT_EIGENSOLVER_HPP
