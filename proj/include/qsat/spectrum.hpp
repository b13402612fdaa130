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


#ifndef QSAT_SPECTRUM_HPP
#define QSAT_SPECTRUM_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qsat/eigensolver.hpp"
#include "qsat/errors.hpp"
#include "qsat/sat.hpp"
#include "qsat/schedule.hpp"
#include "qsat/state.hpp"

namespace qsat {

/// Largest n for which dense 2^n x 2^n Hamiltonians are built.
inline constexpr int kDenseHamiltonianLimit = 12;
/// Largest n for which step unitaries are diagonalized densely.
inline constexpr int kDenseUnitaryLimit = 10;

/// Mixing Hamiltonian as an explicit matrix: omega/2 on the diagonal and
/// -w_i/2 between assignments differing only in variable i.
inline Eigen::MatrixXd mixing_hamiltonian(const MixingWeights &weights,
                                          int limit = kDenseHamiltonianLimit) {
  const int n = weights.qubits();
  if (n > limit)
    throw CapabilityError("dense Hamiltonian limited to n <= " + std::to_string(limit));
  const Eigen::Index N = Eigen::Index{1} << n;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index r = 0; r < N; ++r) {
    H(r, r) = 0.5 * weights.omega;
    for (int i = 0; i < n; ++i)
      H(r, r ^ (Eigen::Index{1} << i)) = -0.5 * weights.w[i];
  }
  return H;
}

/// H(f) = (1 - f) H0 + f Hc, dense.
inline Eigen::MatrixXd build_hamiltonian(const CostTable &costs,
                                         const MixingWeights &weights, double f,
                                         int limit = kDenseHamiltonianLimit) {
  Eigen::MatrixXd H = (1.0 - f) * mixing_hamiltonian(weights, limit);
  for (std::size_t s = 0; s < costs.size(); ++s)
    H(s, s) += f * costs[s];
  return H;
}

inline Eigen::MatrixXd build_hamiltonian(const Instance &inst,
                                         const MixingWeights &weights, double f,
                                         int limit = kDenseHamiltonianLimit) {
  if (inst.n > limit)
    throw CapabilityError("dense Hamiltonian limited to n <= " + std::to_string(limit));
  return build_hamiltonian(cost_table(inst), weights, f, limit);
}

/// Matrix-free H(f): y_s = ((1-f) omega/2 + f c(s)) x_s - (1-f)/2 sum_i w_i x_{s^i}.
class HamiltonianOperator {
public:
  HamiltonianOperator(const CostTable &costs, const MixingWeights &weights)
      : n_(weights.qubits()), omega_(weights.omega), w_(weights.w),
        cost_(costs.begin(), costs.end()) {}

  int qubits() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(cost_.size()); }
  void set_f(double f) noexcept { f_ = f; }
  double f() const noexcept { return f_; }

  void operator()(const Eigen::MatrixXd &X, Eigen::MatrixXd &Y) const {
    const Eigen::Index N = dim();
    Y.resize(N, X.cols());
    const double a = (1.0 - f_) * 0.5 * omega_;
    std::vector<double> hw(n_);
    for (int i = 0; i < n_; ++i)
      hw[i] = 0.5 * (1.0 - f_) * w_[i];
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      const double *x = X.col(c).data();
      double *y = Y.col(c).data();
      for (Eigen::Index s = 0; s < N; ++s) {
        double acc = (a + f_ * cost_[s]) * x[s];
        for (int i = 0; i < n_; ++i)
          acc -= hw[i] * x[s ^ (Eigen::Index{1} << i)];
        y[s] = acc;
      }
    }
  }

private:
  int n_;
  double omega_;
  std::vector<double> w_;
  std::vector<double> cost_;
  double f_ = 0.0;
};

/// Approximate inverse of H(f) - theta for the eigensolver. The cost is
/// replaced by its mean plus single-variable fields (its first-order Walsh
/// terms); the resulting operator is a sum of commuting one-qubit terms and
/// is inverted exactly in its product eigenbasis. Where the dropped cost
/// terms outweigh the mixing term, the exact diagonal of H(f) is inverted
/// instead.
class HamiltonianPreconditioner {
public:
  HamiltonianPreconditioner(const CostTable &costs, const MixingWeights &weights)
      : n_(weights.qubits()), w_(weights.w), field_(weights.qubits(), 0.0),
        rot_(weights.qubits()), lam0_(weights.qubits()), lam1_(weights.qubits()),
        denom_(costs.size()) {
    const std::size_t N = costs.size();
    double sum = 0.0, sq = 0.0;
    for (std::size_t s = 0; s < N; ++s) {
      const double c = costs[s];
      sum += c;
      sq += c * c;
      for (int i = 0; i < n_; ++i)
        field_[i] += ((s >> i) & 1U) ? -c : c;
    }
    mean_ = sum / static_cast<double>(N);
    double explained = 0.0;
    for (auto &h : field_) {
      h /= static_cast<double>(N);
      explained += h * h;
    }
    residual_ = std::sqrt(std::max(0.0, sq / static_cast<double>(N) - mean_ * mean_ - explained));
    double w2 = 0.0;
    for (double w : w_)
      w2 += w * w;
    hop_ = 0.5 * std::sqrt(w2);
    cost_.assign(costs.begin(), costs.end());
  }

  void set_f(double f) {
    const std::size_t N = denom_.size();
    diagonal_ = f * residual_ > (1.0 - f) * hop_;
    if (diagonal_) {
      double a = 0.0;
      for (double w : w_)
        a += 0.5 * (1.0 - f) * w;
      for (std::size_t s = 0; s < N; ++s)
        denom_[s] = a + f * cost_[s];
      return;
    }
    double base = f * mean_;
    for (int i = 0; i < n_; ++i) {
      // One-qubit term a(1 - X) + f h Z.
      const double a = 0.5 * (1.0 - f) * w_[i];
      const double z = f * field_[i];
      const double r = std::hypot(a, z);
      lam0_[i] = a - r;
      lam1_[i] = a + r;
      rot_[i] = 0.5 * std::atan2(a, -z);
      base += lam0_[i];
    }
    denom_[0] = base;
    for (std::size_t s = 1; s < N; ++s) {
      const int low = std::countr_zero(s);
      denom_[s] = denom_[s & (s - 1)] + lam1_[low] - lam0_[low];
    }
  }

  /// Lowest `count` eigenvectors of the approximating operator.
  Eigen::MatrixXd initial_block(int count) const {
    const std::size_t N = denom_.size();
    std::vector<std::uint64_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    const auto c = std::min<std::size_t>(static_cast<std::size_t>(count), N);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(c), order.end(),
                      [&](auto x, auto y) {
                        return denom_[x] < denom_[y] || (denom_[x] == denom_[y] && x < y);
                      });
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N),
                                                static_cast<Eigen::Index>(c));
    for (std::size_t col = 0; col < c; ++col) {
      out(static_cast<Eigen::Index>(order[col]), static_cast<Eigen::Index>(col)) = 1.0;
      if (!diagonal_)
        rotate(out.col(static_cast<Eigen::Index>(col)), false);
    }
    return out;
  }

  void operator()(Eigen::Ref<Eigen::VectorXd> r, double theta) const {
    constexpr double floor = 1e-2;
    if (!diagonal_)
      rotate(r, true);
    for (Eigen::Index s = 0; s < r.size(); ++s) {
      const double d = denom_[static_cast<std::size_t>(s)] - theta;
      r[s] /= std::abs(d) < floor ? (d < 0 ? -floor : floor) : d;
    }
    if (!diagonal_)
      rotate(r, false);
  }

private:
  // Eigenbasis of qubit i: (cos t, sin t) and (-sin t, cos t), t = rot_[i].
  // `into` maps computational amplitudes to eigenbasis amplitudes.
  void rotate(Eigen::Ref<Eigen::VectorXd> x, bool into) const {
    const std::size_t N = denom_.size();
    for (int i = 0; i < n_; ++i) {
      const double c = std::cos(rot_[i]);
      const double sn = into ? std::sin(rot_[i]) : -std::sin(rot_[i]);
      const std::size_t h = std::size_t{1} << i;
      for (std::size_t base = 0; base < N; base += h << 1)
        for (std::size_t j = base; j < base + h; ++j) {
          const double u = x[static_cast<Eigen::Index>(j)];
          const double v = x[static_cast<Eigen::Index>(j + h)];
          x[static_cast<Eigen::Index>(j)] = c * u + sn * v;
          x[static_cast<Eigen::Index>(j + h)] = -sn * u + c * v;
        }
    }
  }

  int n_;
  std::vector<double> w_;
  std::vector<double> field_;
  std::vector<double> rot_;
  std::vector<double> lam0_;
  std::vector<double> lam1_;
  std::vector<double> denom_;
  std::vector<double> cost_;
  double mean_ = 0.0;
  double residual_ = 0.0;
  double hop_ = 0.0;
  bool diagonal_ = false;
};

/// <c> = sum_s c(s) |phi_s|^2.
inline double expected_cost(std::span<const double> eigvec, const CostTable &costs) {
  if (eigvec.size() != costs.size())
    throw ArgumentError("eigenvector size differs from the cost table");
  double acc = 0.0;
  for (std::size_t s = 0; s < costs.size(); ++s)
    acc += costs[s] * eigvec[s] * eigvec[s];
  return acc;
}

inline double expected_cost(const Eigen::VectorXd &eigvec, const CostTable &costs) {
  return expected_cost(std::span<const double>(eigvec.data(), eigvec.size()), costs);
}

/// Lowest levels of H(f) at one f.
struct SpectrumPoint {
  double f = 0.0;
  std::vector<double> values;    ///< ascending
  std::vector<double> overlaps;  ///< probability on the solution subspace
  double gap = std::numeric_limits<double>::quiet_NaN();
  double expected_cost_ground = 0.0;
  int iterations = 0;

  bool gap_defined() const noexcept { return std::isfinite(gap); }
};

struct SpectrumProfile {
  std::vector<SpectrumPoint> points; ///< ascending f
  double min_gap = std::numeric_limits<double>::quiet_NaN();
  double f_star = std::numeric_limits<double>::quiet_NaN();
  int refinement_depth = 0;
  /// Largest |<c>(f_{i+1}) - <c>(f_i)| between neighbouring grid points.
  double max_cost_jump = 0.0;
  int levels = 0;
};

/// Which excited level defines the gap.
enum class GapRule {
  /// Levels are ordered and, H(f) being irreducible for f < 1, do not cross;
  /// the S lowest levels are the ones that become the S solutions at f = 1,
  /// so g = E_S - E_0.
  solution_count,
  /// First excited level whose overlap with the solution subspace is at
  /// most `solution_threshold`.
  overlap,
};

struct GapOptions {
  int levels = 6; ///< minimum number of levels computed
  GapRule rule = GapRule::solution_count;
  int dense_max_n = 8; ///< dense eigendecomposition up to this n
  double tol = 1e-10;
  int refine_rounds = 3;
  int refine_factor = 10;
  /// Overlap with the solution subspace above which a level counts as a
  /// solution level.
  double solution_threshold = 0.5;
  bool precondition = true;
};

/// f_i = i / (points - 1), i = 0..points-1.
inline std::vector<double> uniform_f_grid(int points = 101) {
  if (points < 2)
    throw ArgumentError("f grid needs at least 2 points");
  std::vector<double> f(points);
  for (int i = 0; i < points; ++i)
    f[i] = static_cast<double>(i) / (points - 1);
  return f;
}

/// Eigen-analysis of H(f) for one instance.
class SpectrumSolver {
public:
  SpectrumSolver(const Instance &inst, const MixingWeights &weights,
                 GapOptions opts = {})
      : costs_(cost_table(inst)), weights_(weights),
        solutions_(inst.solution_list()), op_(costs_, weights), pre_(costs_, weights),
        opts_(opts) {
    if (opts_.levels < 2)
      throw ArgumentError("gap analysis needs at least 2 levels");
  }

  const CostTable &costs() const noexcept { return costs_; }
  const GapOptions &options() const noexcept { return opts_; }

  /// Lowest levels at f. `vectors` receives the eigenvectors and, when
  /// nonempty on entry, seeds the iterative solver.
  /// Number of levels computed per f.
  int levels() const noexcept {
    int L = opts_.levels;
    if (opts_.rule == GapRule::solution_count)
      L = std::max<int>(L, static_cast<int>(solutions_.size()) + 1);
    return std::min<int>(L, static_cast<int>(costs_.size()));
  }

  SpectrumPoint solve(double f, Eigen::MatrixXd *vectors = nullptr,
                      double vector_tol = 0.0) {
    SpectrumPoint pt;
    pt.f = f;
    const int L = levels();
    Eigen::VectorXd vals;
    Eigen::MatrixXd vecs;
    if (weights_.qubits() <= opts_.dense_max_n) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          build_hamiltonian(costs_, weights_, f, opts_.dense_max_n));
      vals = es.eigenvalues().head(L);
      vecs = es.eigenvectors().leftCols(L);
    } else {
      op_.set_f(f);
      pre_.set_f(f);
      EigenOptions eo;
      eo.tol = opts_.tol;
      eo.vector_tol = vector_tol;
      eo.tag = f;
      const Eigen::MatrixXd *guess =
          vectors != nullptr && vectors->cols() > 0 ? vectors : nullptr;
      Eigen::MatrixXd seeded;
      if (guess == nullptr && opts_.precondition) {
        seeded = pre_.initial_block(L + 2);
        guess = &seeded;
      }
      auto r = opts_.precondition ? lowest_eigenpairs(op_, op_.dim(), L, eo, guess, pre_)
                                  : lowest_eigenpairs(op_, op_.dim(), L, eo, guess);
      vals = std::move(r.values);
      vecs = std::move(r.vectors);
      pt.iterations = r.iterations;
    }
    pt.values.assign(vals.data(), vals.data() + vals.size());
    pt.overlaps.resize(L);
    for (int a = 0; a < L; ++a) {
      double p = 0.0;
      for (auto s : solutions_)
        p += vecs(static_cast<Eigen::Index>(s), a) * vecs(static_cast<Eigen::Index>(s), a);
      pt.overlaps[a] = p;
    }
    if (opts_.rule == GapRule::solution_count) {
      const auto S = static_cast<int>(solutions_.size());
      if (S < L)
        pt.gap = pt.values[S] - pt.values[0];
    } else {
      for (int a = 1; a < L; ++a)
        if (pt.overlaps[a] <= opts_.solution_threshold) {
          pt.gap = pt.values[a] - pt.values[0];
          break;
        }
    }
    pt.expected_cost_ground = expected_cost(Eigen::VectorXd(vecs.col(0)), costs_);
    if (vectors != nullptr)
      *vectors = std::move(vecs);
    return pt;
  }

  /// Profile over `grid`, then `refine_rounds` rounds of local refinement
  /// around the smallest gap found so far.
  SpectrumProfile profile(std::vector<double> grid) {
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    SpectrumProfile prof;
    prof.levels = levels();
    // Eigenvectors at the smallest gap seen so far seed each refinement.
    Eigen::MatrixXd warm, best_vectors;
    double best_gap = std::numeric_limits<double>::infinity();
    auto visit = [&](double f, Eigen::MatrixXd &seed) {
      prof.points.push_back(solve(f, &seed));
      const double g = prof.points.back().gap;
      if (!std::isnan(g) && g < best_gap) {
        best_gap = g;
        best_vectors = seed;
      }
    };
    for (double f : grid)
      visit(f, warm);

    double spacing = grid.size() > 1 ? (grid.back() - grid.front()) / (grid.size() - 1) : 0.0;
    for (int round = 0; round < opts_.refine_rounds && spacing > 0.0; ++round) {
      const auto best = argmin_gap(prof.points);
      if (best < 0)
        break;
      const double center = prof.points[best].f;
      const double fine = spacing / opts_.refine_factor;
      const Eigen::MatrixXd center_vectors = best_vectors;
      for (int dir : {-1, 1}) {
        Eigen::MatrixXd local = center_vectors;
        for (int t = 1; t < opts_.refine_factor; ++t) {
          const double f = center + dir * t * fine;
          if (f < 0.0 || f > 1.0)
            break;
          const bool seen = std::any_of(prof.points.begin(), prof.points.end(),
                                        [&](const SpectrumPoint &p) {
                                          return std::abs(p.f - f) < 1e-12;
                                        });
          if (!seen)
            visit(f, local);
        }
      }
      std::sort(prof.points.begin(), prof.points.end(),
                [](const SpectrumPoint &a, const SpectrumPoint &b) { return a.f < b.f; });
      spacing = fine;
      prof.refinement_depth = round + 1;
    }
    const auto best = argmin_gap(prof.points);
    if (best >= 0) {
      prof.min_gap = prof.points[best].gap;
      prof.f_star = prof.points[best].f;
    }
    for (std::size_t i = 1; i < prof.points.size(); ++i)
      prof.max_cost_jump =
          std::max(prof.max_cost_jump, std::abs(prof.points[i].expected_cost_ground -
                                                prof.points[i - 1].expected_cost_ground));
    return prof;
  }

  static long argmin_gap(const std::vector<SpectrumPoint> &pts) {
    long best = -1;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (pts[i].gap_defined() && (best < 0 || pts[i].gap < pts[best].gap))
        best = static_cast<long>(i);
    return best;
  }

private:
  CostTable costs_;
  MixingWeights weights_;
  std::vector<std::uint64_t> solutions_;
  HamiltonianOperator op_;
  HamiltonianPreconditioner pre_;
  GapOptions opts_;
};

/// Gap g(f) over a grid with local refinement near the minimum.
inline SpectrumProfile gap_profile(const Instance &inst, const MixingWeights &weights,
                                   std::vector<double> f_grid = uniform_f_grid(),
                                   GapOptions opts = {}) {
  return SpectrumSolver(inst, weights, opts).profile(std::move(f_grid));
}

/// Grid points where g jumps by more than `factor` times the neighbouring
/// steps (a sign of a tracking or classification error).
inline std::vector<std::size_t> gap_discontinuities(const SpectrumProfile &prof,
                                                    double factor = 10.0) {
  std::vector<std::size_t> out;
  const auto &p = prof.points;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (!p[i - 1].gap_defined() || !p[i].gap_defined() || !p[i + 1].gap_defined())
      continue;
    const double left = std::abs(p[i].gap - p[i - 1].gap) / (p[i].f - p[i - 1].f);
    const double right = std::abs(p[i + 1].gap - p[i].gap) / (p[i + 1].f - p[i].f);
    const double lo = std::min(left, right), hi = std::max(left, right);
    if (hi > factor * std::max(lo, 1.0))
      out.push_back(i);
  }
  return out;
}

/// CSV: f, eigenvalue_1..L, overlap_1..L, gap, expected_cost_ground.
inline void write_profile_csv(std::ostream &os, const SpectrumProfile &prof) {
  const int L = prof.levels;
  os << "f";
  for (int a = 1; a <= L; ++a)
    os << ",eigenvalue_" << a;
  for (int a = 1; a <= L; ++a)
    os << ",overlap_" << a;
  os << ",gap,expected_cost_ground\n";
  char buf[64];
  auto num = [&](double v) {
    if (!std::isfinite(v))
      return std::string("nan");
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  for (const auto &pt : prof.points) {
    os << num(pt.f);
    for (int a = 0; a < L; ++a)
      os << "," << (a < static_cast<int>(pt.values.size()) ? num(pt.values[a]) : "nan");
    for (int a = 0; a < L; ++a)
      os << "," << (a < static_cast<int>(pt.overlaps.size()) ? num(pt.overlaps[a]) : "nan");
    os << "," << num(pt.gap) << "," << num(pt.expected_cost_ground) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Step unitary U(f) = exp(-i tau H0 delta) exp(-i rho Hc delta).

using Eigen::MatrixXcd;

/// exp(-i t H) for real symmetric H.
inline MatrixXcd expm_hermitian(const Eigen::MatrixXd &H, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXcd ph =
      (es.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0.0, -t))
          .array()
          .exp();
  const MatrixXcd Q = es.eigenvectors().cast<std::complex<double>>();
  return Q * ph.asDiagonal() * Q.adjoint();
}

inline MatrixXcd step_unitary(const Eigen::MatrixXd &h0, std::span<const double> hc,
                              double tau_angle, double rho_angle) {
  MatrixXcd U = expm_hermitian(h0, tau_angle);
  for (Eigen::Index c = 0; c < U.cols(); ++c)
    U.col(c) *= std::polar(1.0, -rho_angle * hc[c]);
  return U;
}

/// Eigenphases theta_r in (-pi, pi] of a unitary (eigenvalues e^{-i theta_r})
/// with orthonormal eigenvectors, ordered by ascending theta.
struct EigenphasePoint {
  double f = 0.0;
  std::vector<double> theta;
  MatrixXcd vectors;
};

inline double wrap_phase(double theta) {
  constexpr double pi = std::numbers::pi;
  double t = std::remainder(theta, 2.0 * pi);
  if (t <= -pi)
    t += 2.0 * pi;
  return t;
}

inline EigenphasePoint unitary_eigenphases(const MatrixXcd &U) {
  // U is normal, so its complex Schur form is diagonal and the Schur vectors
  // are orthonormal eigenvectors.
  Eigen::ComplexSchur<MatrixXcd> schur(U);
  const auto &T = schur.matrixT();
  const auto &Q = schur.matrixU();
  const Eigen::Index N = U.rows();
  std::vector<Eigen::Index> order(N);
  std::vector<double> theta(N);
  for (Eigen::Index r = 0; r < N; ++r) {
    theta[r] = wrap_phase(-std::arg(T(r, r)));
    order[r] = r;
  }
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return theta[a] < theta[b]; });
  EigenphasePoint pt;
  pt.vectors.resize(N, N);
  for (Eigen::Index r = 0; r < N; ++r) {
    pt.theta.push_back(theta[order[r]]);
    pt.vectors.col(r) = Q.col(order[r]);
  }
  return pt;
}

/// Eigenphases of U(f) with tau = 1 - f and rho = f.
inline EigenphasePoint step_eigenphases(const Eigen::MatrixXd &h0,
                                        std::span<const double> hc, double f,
                                        double delta) {
  if (h0.rows() > (Eigen::Index{1} << kDenseUnitaryLimit))
    throw CapabilityError("dense unitary eigendecomposition limited to n <= " +
                          std::to_string(kDenseUnitaryLimit));
  auto pt = unitary_eigenphases(step_unitary(h0, hc, (1.0 - f) * delta, f * delta));
  pt.f = f;
  return pt;
}

/// Stepped evolution alongside continuity-tracked eigenvectors of U(f).
struct EigenphaseTrace {
  std::vector<double> f;
  /// theta[h][r]: phase of tracked level r at step h.
  std::vector<std::vector<double>> theta;
  /// overlap[h][r] = |<e_r(f_h)|psi^(h)>|^2, psi^(h) after step h.
  std::vector<std::vector<double>> overlap;
  /// Probability of each tracked eigenvector of the final U on the solutions.
  std::vector<double> final_solution_weight;
  std::vector<bool> wrapped;       ///< level crossed the branch cut at +-pi
  std::vector<std::string> warnings;
  int initial_level = 0;  ///< tracked level holding the initial state
  int followed_level = 0; ///< tracked level with the largest final overlap
  double p_soln = 0.0;
  std::vector<double> p_trace;
};

/// Matches the columns of `next` to the labels of `prev` by maximal overlap.
/// Returns perm with next column perm[r] carrying label r.
inline std::vector<Eigen::Index> match_levels(const MatrixXcd &prev, const MatrixXcd &next,
                                              bool *ambiguous = nullptr) {
  const Eigen::Index N = prev.cols();
  const Eigen::MatrixXd ov = (prev.adjoint() * next).cwiseAbs2();
  std::vector<Eigen::Index> perm(N, -1);
  std::vector<bool> used(N, false);
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> cand;
  cand.reserve(N * N);
  for (Eigen::Index r = 0; r < N; ++r)
    for (Eigen::Index c = 0; c < N; ++c)
      cand.emplace_back(ov(r, c), r, c);
  std::sort(cand.begin(), cand.end(),
            [](const auto &a, const auto &b) { return std::get<0>(a) > std::get<0>(b); });
  bool amb = false;
  for (const auto &[o, r, c] : cand) {
    if (perm[r] >= 0 || used[c])
      continue;
    perm[r] = c;
    used[c] = true;
    if (o < 0.5)
      amb = true;
  }
  if (ambiguous != nullptr)
    *ambiguous = amb;
  return perm;
}

/// Runs `schedule` with dense step unitaries built from (h0, hc) and tracks
/// every eigenvector of U(f_h) across steps.
inline EigenphaseTrace adiabatic_trace(const Eigen::MatrixXd &h0, std::span<const double> hc,
                                       std::span<const std::uint64_t> solutions,
                                       const Schedule &schedule) {
  const Eigen::Index N = h0.rows();
  if (N > (Eigen::Index{1} << kDenseUnitaryLimit))
    throw CapabilityError("eigenphase tracking limited to n <= " +
                          std::to_string(kDenseUnitaryLimit));
  if (static_cast<Eigen::Index>(hc.size()) != N)
    throw ArgumentError("cost diagonal size differs from H0");
  EigenphaseTrace tr;
  tr.wrapped.assign(N, false);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(N, 1.0 / std::sqrt(static_cast<double>(N)));
  MatrixXcd basis;
  for (int h = 0; h < schedule.j; ++h) {
    const double f = schedule.f[h];
    const double ta = schedule.tau(f) * schedule.delta;
    const double ra = schedule.rho(f) * schedule.delta;
    const MatrixXcd U = step_unitary(h0, hc, ta, ra);
    auto pt = unitary_eigenphases(U);
    std::vector<double> theta(N);
    MatrixXcd vecs(N, N);
    if (h == 0) {
      theta = pt.theta;
      vecs = pt.vectors;
      const Eigen::VectorXd ov0 = (vecs.adjoint() * psi).cwiseAbs2();
      Eigen::Index arg;
      ov0.maxCoeff(&arg);
      tr.initial_level = static_cast<int>(arg);
    } else {
      bool amb = false;
      const auto perm = match_levels(basis, pt.vectors, &amb);
      if (amb)
        tr.warnings.push_back("ambiguous level tracking at f=" + std::to_string(f));
      for (Eigen::Index r = 0; r < N; ++r) {
        theta[r] = pt.theta[perm[r]];
        vecs.col(r) = pt.vectors.col(perm[r]);
        if (std::abs(theta[r] - tr.theta.back()[r]) > std::numbers::pi)
          tr.wrapped[r] = true;
      }
    }
    basis = vecs;
    psi = U * psi;
    double p = 0.0;
    for (auto s : solutions)
      p += std::norm(psi(static_cast<Eigen::Index>(s)));
    tr.p_trace.push_back(p);
    tr.f.push_back(f);
    tr.theta.push_back(theta);
    const Eigen::VectorXd ov = (vecs.adjoint() * psi).cwiseAbs2();
    tr.overlap.emplace_back(ov.data(), ov.data() + N);
  }
  if (!tr.overlap.empty()) {
    const auto &last = tr.overlap.back();
    tr.followed_level = static_cast<int>(
        std::max_element(last.begin(), last.end()) - last.begin());
    tr.p_soln = tr.p_trace.back();
    tr.final_solution_weight.assign(N, 0.0);
    for (Eigen::Index r = 0; r < N; ++r)
      for (auto s : solutions)
        tr.final_solution_weight[r] += std::norm(basis(static_cast<Eigen::Index>(s), r));
  } else {
    for (auto s : solutions)
      tr.p_soln += std::norm(psi(static_cast<Eigen::Index>(s)));
  }
  return tr;
}

inline EigenphaseTrace adiabatic_trace(const Instance &inst, const MixingWeights &weights,
                                       const Schedule &schedule) {
  if (inst.n > kDenseUnitaryLimit)
    throw CapabilityError("eigenphase tracking limited to n <= " +
                          std::to_string(kDenseUnitaryLimit));
  const auto costs = cost_table(inst);
  std::vector<double> hc(costs.begin(), costs.end());
  return adiabatic_trace(mixing_hamiltonian(weights), hc, inst.solution_list(), schedule);
}

/// Upper bound on the eigenphase spread of U(f) over the schedule:
/// max_h delta (tau(f_h) ||H0|| + rho(f_h) max c). Below pi no eigenphase can
/// reach the branch cut.
inline double phase_spread_bound(const Eigen::MatrixXd &h0, std::span<const double> hc,
                                 const Schedule &schedule) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h0, Eigen::EigenvaluesOnly);
  const double h0max = es.eigenvalues().cwiseAbs().maxCoeff();
  double cmax = 0.0;
  for (double c : hc)
    cmax = std::max(cmax, std::abs(c));
  double bound = 0.0;
  for (double f : schedule.f)
    bound = std::max(bound, schedule.delta * (std::abs(schedule.tau(f)) * h0max +
                                              std::abs(schedule.rho(f)) * cmax));
  return bound;
}

/// The single-variable pair H0 = [[1,-1],[-1,1]]/2, Hc = diag(0, 2), as an
/// instance: n = 1, k = 1 and the clause (NOT v1) twice.
inline Instance two_level_example() {
  Instance inst;
  inst.n = 1;
  inst.k = 1;
  Clause cl;
  cl.vars = {0};
  cl.negated = {true};
  inst.clauses = {cl, cl};
  inst.solutions = std::vector<std::uint64_t>{0};
  return inst;
}

} // namespace qsat

#endif // QSAT_SPECTRUM_HPP
