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


#ifndef QSAT_STATE_HPP
#define QSAT_STATE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qsat/errors.hpp"
#include "qsat/sat.hpp"

namespace qsat {

using complex = std::complex<double>;

/// Default upper bound on the qubit count (2^26 amplitudes = 1 GiB).
inline constexpr int kDefaultQubitLimit = 26;

/// Amplitude vector over the 2^n assignments of n variables.
class QuantumState {
public:
  QuantumState() = default;
  QuantumState(int n, std::vector<complex> amps) : n_(n), amps_(std::move(amps)) {
    if (amps_.size() != (std::size_t{1} << n_))
      throw ArgumentError("amplitude count must be 2^n");
  }

  int qubits() const noexcept { return n_; }
  std::size_t size() const noexcept { return amps_.size(); }

  complex &operator[](std::size_t s) { return amps_[s]; }
  const complex &operator[](std::size_t s) const { return amps_[s]; }

  std::span<complex> amplitudes() noexcept { return amps_; }
  std::span<const complex> amplitudes() const noexcept { return amps_; }

  double norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto &a : amps_)
      acc += std::norm(a);
    return acc;
  }
  /// |<psi|psi> - 1|. Runs never renormalize; this is the drift diagnostic.
  double norm_drift() const noexcept { return std::abs(norm_squared() - 1.0); }

private:
  int n_ = 0;
  std::vector<complex> amps_;
};

inline void check_qubits(int n, int limit = kDefaultQubitLimit) {
  if (n < 1 || n > limit)
    throw CapabilityError("qubit count " + std::to_string(n) +
                          " outside supported range [1, " +
                          std::to_string(limit) + "]");
}

/// Ground state of the mixing Hamiltonian: every amplitude 2^{-n/2}.
inline QuantumState uniform_state(int n, int limit = kDefaultQubitLimit) {
  check_qubits(n, limit);
  const double a = n % 2 == 0 ? std::ldexp(1.0, -n / 2)
                              : std::ldexp(0.70710678118654752440, -(n - 1) / 2);
  return QuantumState(n, std::vector<complex>(std::size_t{1} << n, complex(a, 0.0)));
}

/// Computational basis state |s>.
inline QuantumState basis_state(int n, std::uint64_t s,
                                int limit = kDefaultQubitLimit) {
  check_qubits(n, limit);
  std::vector<complex> amps(std::size_t{1} << n);
  if (s >= amps.size())
    throw ArgumentError("basis index out of range");
  amps[s] = 1.0;
  return QuantumState(n, std::move(amps));
}

enum class WeightMode { unweighted, clause_count, normalized, custom };

inline const char *to_string(WeightMode m) {
  switch (m) {
  case WeightMode::unweighted:
    return "unweighted";
  case WeightMode::clause_count:
    return "clause-count";
  case WeightMode::normalized:
    return "normalized";
  case WeightMode::custom:
    return "custom";
  }
  return "?";
}

inline WeightMode weight_mode_from_string(const std::string &s) {
  if (s == "unweighted")
    return WeightMode::unweighted;
  if (s == "clause-count" || s == "clause_count")
    return WeightMode::clause_count;
  if (s == "normalized")
    return WeightMode::normalized;
  throw ArgumentError("unknown weight mode '" + s + "'");
}

/// Per-variable weights w_i of the mixing Hamiltonian and omega = sum w_i.
///
/// When every weight is an integer multiple of `unit` the multiples are kept
/// in `units`, which lets the mixing diagonal be indexed by integer sums.
struct MixingWeights {
  std::vector<double> w;
  double omega = 0.0;
  WeightMode mode = WeightMode::custom;
  double unit = 0.0;
  std::vector<int> units;

  int qubits() const noexcept { return static_cast<int>(w.size()); }
};

inline MixingWeights custom_weights(std::vector<double> w) {
  if (w.empty())
    throw ArgumentError("weights must be nonempty");
  for (double x : w)
    if (!(x > 0.0) || !std::isfinite(x))
      throw DegenerateWeightError("mixing weights must be positive and finite");
  MixingWeights mw;
  mw.omega = std::accumulate(w.begin(), w.end(), 0.0);
  mw.w = std::move(w);
  mw.mode = WeightMode::custom;
  return mw;
}

inline MixingWeights unweighted(int n) {
  MixingWeights mw;
  mw.w.assign(n, 1.0);
  mw.omega = n;
  mw.mode = WeightMode::unweighted;
  mw.unit = 1.0;
  mw.units.assign(n, 1);
  return mw;
}

/// Mixing weights for an instance: all ones, the number of clauses each
/// variable appears in, or those counts rescaled to mean 1.
inline MixingWeights make_weights(const Instance &inst, WeightMode mode) {
  if (mode == WeightMode::unweighted)
    return unweighted(inst.n);
  if (mode == WeightMode::custom)
    throw ArgumentError("custom weights must be built with custom_weights()");
  std::vector<int> counts(inst.n, 0);
  for (const auto &cl : inst.clauses)
    for (int v : cl.vars)
      ++counts[v];
  for (int i = 0; i < inst.n; ++i)
    if (counts[i] == 0)
      throw DegenerateWeightError("variable " + std::to_string(i + 1) +
                                  " appears in no clause; its weight would be 0");
  const long total = std::accumulate(counts.begin(), counts.end(), 0L);
  MixingWeights mw;
  mw.mode = mode;
  mw.units = counts;
  mw.unit = mode == WeightMode::clause_count
                ? 1.0
                : static_cast<double>(inst.n) / static_cast<double>(total);
  mw.w.resize(inst.n);
  for (int i = 0; i < inst.n; ++i)
    mw.w[i] = mw.unit * counts[i];
  mw.omega = mode == WeightMode::clause_count ? static_cast<double>(total)
                                              : static_cast<double>(inst.n);
  return mw;
}

/// A real diagonal operator stored as distinct levels plus a per-state level
/// index, so exp(-i theta D) needs one complex exponential per level.
struct DiagonalLevels {
  std::vector<double> levels;
  std::vector<std::uint32_t> index;

  double value(std::size_t s) const { return levels[index[s]]; }
  std::size_t size() const noexcept { return index.size(); }
};

inline DiagonalLevels cost_levels(const CostTable &table) {
  DiagonalLevels d;
  const auto top = table.empty() ? 0 : *std::max_element(table.begin(), table.end());
  d.levels.resize(static_cast<std::size_t>(top) + 1);
  for (std::size_t c = 0; c < d.levels.size(); ++c)
    d.levels[c] = static_cast<double>(c);
  d.index.assign(table.begin(), table.end());
  return d;
}

/// Diagonal D of the mixing Hamiltonian in the Walsh-Hadamard basis:
/// D_rr = sum_i w_i r_i.
inline DiagonalLevels mixing_levels(const MixingWeights &mw) {
  const int n = mw.qubits();
  const std::size_t N = std::size_t{1} << n;
  DiagonalLevels d;
  d.index.resize(N);
  if (!mw.units.empty()) {
    // D_{r xor top} = D_r + units[bit]; build by doubling.
    std::vector<std::uint32_t> sums(N, 0);
    for (int i = 0; i < n; ++i) {
      const std::size_t half = std::size_t{1} << i;
      for (std::size_t r = 0; r < half; ++r)
        sums[r | half] = sums[r] + static_cast<std::uint32_t>(mw.units[i]);
    }
    const auto top = *std::max_element(sums.begin(), sums.end());
    d.levels.resize(top + 1);
    for (std::uint32_t l = 0; l <= top; ++l)
      d.levels[l] = mw.unit * l;
    d.index = std::move(sums);
    return d;
  }
  std::vector<double> vals(N, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::size_t half = std::size_t{1} << i;
    for (std::size_t r = 0; r < half; ++r)
      vals[r | half] = vals[r] + mw.w[i];
  }
  std::map<double, std::uint32_t> ids;
  for (double v : vals)
    ids.emplace(v, 0);
  std::uint32_t next = 0;
  for (auto &[v, id] : ids) {
    id = next++;
    d.levels.push_back(v);
  }
  for (std::size_t r = 0; r < N; ++r)
    d.index[r] = ids[vals[r]];
  return d;
}

namespace detail {

/// In-place unnormalized fast Walsh-Hadamard transform: n butterfly passes.
template <class T> void fwht(std::span<T> x) {
  const std::size_t N = x.size();
  for (std::size_t h = 1; h < N; h <<= 1) {
    for (std::size_t i = 0; i < N; i += h << 1) {
      T *lo = x.data() + i;
      T *hi = lo + h;
      for (std::size_t j = 0; j < h; ++j) {
        const T a = lo[j];
        const T b = hi[j];
        lo[j] = a + b;
        hi[j] = a - b;
      }
    }
  }
}

/// amps[s] *= scale * exp(-i theta levels[index[s]]).
inline void apply_levels(std::span<complex> amps, const DiagonalLevels &d,
                         double theta, double scale) {
  std::vector<complex> table(d.levels.size());
  for (std::size_t l = 0; l < table.size(); ++l)
    table[l] = scale * std::polar(1.0, -theta * d.levels[l]);
  const std::uint32_t *idx = d.index.data();
  for (std::size_t s = 0; s < amps.size(); ++s) {
    const complex p = table[idx[s]];
    const double re = amps[s].real(), im = amps[s].imag();
    amps[s] = complex(re * p.real() - im * p.imag(), re * p.imag() + im * p.real());
  }
}

} // namespace detail

/// psi <- W psi with W_rs = 2^{-n/2} (-1)^{r.s}. Self-inverse.
inline void walsh_hadamard(QuantumState &psi) {
  auto amps = psi.amplitudes();
  detail::fwht(amps);
  const int n = psi.qubits();
  const double scale = n % 2 == 0 ? std::ldexp(1.0, -n / 2)
                                  : std::ldexp(0.70710678118654752440, -(n - 1) / 2);
  for (auto &a : amps)
    a *= scale;
}

/// Precomputed diagonals for one (instance, weights) pair. Each step is two
/// diagonal sweeps and two fast transforms.
class StepKernel {
public:
  StepKernel(const Instance &inst, const MixingWeights &weights)
      : StepKernel(cost_table(inst), weights) {}

  StepKernel(const CostTable &costs, const MixingWeights &weights)
      : n_(weights.qubits()), cost_(cost_levels(costs)),
        mixing_(mixing_levels(weights)) {
    if ((std::size_t{1} << n_) != costs.size())
      throw ArgumentError("weights and cost table disagree on n");
  }

  int qubits() const noexcept { return n_; }
  const DiagonalLevels &cost() const noexcept { return cost_; }
  const DiagonalLevels &mixing() const noexcept { return mixing_; }

  /// psi_s <- exp(-i theta c(s)) psi_s.
  void apply_cost_phase(QuantumState &psi, double theta) const {
    check(psi);
    if (theta == 0.0)
      return;
    detail::apply_levels(psi.amplitudes(), cost_, theta, 1.0);
  }

  /// psi <- exp(-i theta H0) psi, computed as W exp(-i theta D) W.
  void apply_mixing_phase(QuantumState &psi, double theta) const {
    check(psi);
    if (theta == 0.0)
      return;
    auto amps = psi.amplitudes();
    detail::fwht(amps);
    detail::apply_levels(amps, mixing_, theta, std::ldexp(1.0, -n_));
    detail::fwht(amps);
  }

  /// One discrete step: cost phase (angle rho*delta), then mixing phase
  /// (angle tau*delta).
  void step(QuantumState &psi, double tau, double rho, double delta) const {
    apply_cost_phase(psi, rho * delta);
    apply_mixing_phase(psi, tau * delta);
  }

private:
  void check(const QuantumState &psi) const {
    if (psi.qubits() != n_)
      throw ArgumentError("state has " + std::to_string(psi.qubits()) +
                          " qubits, kernel expects " + std::to_string(n_));
  }

  int n_;
  DiagonalLevels cost_;
  DiagonalLevels mixing_;
};

inline void apply_cost_phase(QuantumState &psi, const Instance &inst,
                             double theta) {
  if (psi.qubits() != inst.n)
    throw ArgumentError("state and instance disagree on n");
  detail::apply_levels(psi.amplitudes(), cost_levels(cost_table(inst)), theta,
                       1.0);
}

inline void apply_mixing_phase(QuantumState &psi, const MixingWeights &weights,
                               double theta) {
  if (psi.qubits() != weights.qubits())
    throw ArgumentError("state and weights disagree on n");
  auto amps = psi.amplitudes();
  detail::fwht(amps);
  detail::apply_levels(amps, mixing_levels(weights), theta,
                       std::ldexp(1.0, -psi.qubits()));
  detail::fwht(amps);
}

inline void step(QuantumState &psi, const Instance &inst,
                 const MixingWeights &weights, double tau, double rho,
                 double delta) {
  StepKernel(inst, weights).step(psi, tau, rho, delta);
}

/// Total probability on the given solution indices.
inline double solution_probability(const QuantumState &psi,
                                   std::span<const std::uint64_t> solutions) {
  double p = 0.0;
  for (auto s : solutions) {
    if (s >= psi.size())
      throw ArgumentError("solution index out of range");
    p += std::norm(psi[s]);
  }
  return p;
}

inline double solution_probability(const QuantumState &psi,
                                   const Instance &inst) {
  return solution_probability(psi, std::span<const std::uint64_t>(inst.solution_list()));
}

// Amplitude dumps: u32 n, u64 step index, then 2^n (re, im) doubles, all
// little-endian.

namespace detail {

template <class T> void put_le(std::ostream &os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char *>(buf), sizeof(T));
}

template <class T> T get_le(std::istream &is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char *>(buf), sizeof(T)))
    throw ParseError(0, "truncated amplitude dump");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

} // namespace detail

inline void write_amplitudes(std::ostream &os, const QuantumState &psi,
                             std::uint64_t step_index) {
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(psi.qubits()));
  detail::put_le<std::uint64_t>(os, step_index);
  for (const auto &a : psi.amplitudes()) {
    detail::put_le<double>(os, a.real());
    detail::put_le<double>(os, a.imag());
  }
}

struct AmplitudeDump {
  QuantumState state;
  std::uint64_t step_index = 0;
};

inline AmplitudeDump read_amplitudes(std::istream &is,
                                     int limit = kDefaultQubitLimit) {
  const auto n = static_cast<int>(detail::get_le<std::uint32_t>(is));
  check_qubits(n, limit);
  const auto step_index = detail::get_le<std::uint64_t>(is);
  std::vector<complex> amps(std::size_t{1} << n);
  for (auto &a : amps) {
    const double re = detail::get_le<double>(is);
    const double im = detail::get_le<double>(is);
    a = complex(re, im);
  }
  return {QuantumState(n, std::move(amps)), step_index};
}

} // namespace qsat

#endif // QSAT_STATE_HPP
