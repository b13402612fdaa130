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


#ifndef QSAT_SCHEDULE_HPP
#define QSAT_SCHEDULE_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsat/errors.hpp"
#include "qsat/state.hpp"

namespace qsat {

/// A phase function of f. Polynomials carry their coefficients so schedules
/// can be serialized; arbitrary callables serialize as "custom".
class PhaseFunction {
public:
  PhaseFunction() : coeffs_{0.0} {}

  /// c[0] + c[1] f + c[2] f^2 + ...
  static PhaseFunction polynomial(std::vector<double> c) {
    PhaseFunction p;
    p.coeffs_ = c.empty() ? std::vector<double>{0.0} : std::move(c);
    return p;
  }
  static PhaseFunction constant(double a) { return polynomial({a}); }
  static PhaseFunction custom(std::function<double(double)> fn,
                              std::string label = "custom") {
    PhaseFunction p;
    p.coeffs_.clear();
    p.fn_ = std::move(fn);
    p.label_ = std::move(label);
    return p;
  }

  double operator()(double f) const {
    if (fn_)
      return fn_(f);
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
      acc = acc * f + *it;
    return acc;
  }

  bool is_polynomial() const noexcept { return !fn_; }
  const std::vector<double> &coefficients() const noexcept { return coeffs_; }
  const std::string &label() const noexcept { return label_; }

private:
  std::vector<double> coeffs_;
  std::function<double(double)> fn_;
  std::string label_;
};

enum class DeltaRule { power, constant, heuristic };
enum class GridKind { linear, reparameterized };

inline const char *to_string(DeltaRule r) {
  switch (r) {
  case DeltaRule::power:
    return "power";
  case DeltaRule::constant:
    return "constant";
  case DeltaRule::heuristic:
    return "heuristic";
  }
  return "?";
}

inline const char *to_string(GridKind g) {
  return g == GridKind::linear ? "linear" : "reparameterized";
}

/// j discrete steps at f values f_1..f_j, each with angles tau(f)*delta
/// (mixing) and rho(f)*delta (cost).
struct Schedule {
  std::string family;
  int j = 0;
  DeltaRule delta_rule = DeltaRule::constant;
  double alpha = 0.0; ///< exponent for DeltaRule::power
  double delta = 0.0;
  PhaseFunction tau;
  PhaseFunction rho;
  GridKind grid = GridKind::linear;
  std::vector<double> f; ///< size j, strictly inside (0, 1)

  /// Total evolution time of the continuous formulation, T = j delta.
  double total_time() const noexcept { return j * delta; }
};

/// f_h = h / (j + 1) for h = 1..j.
inline std::vector<double> linear_grid(int j) {
  std::vector<double> f(j > 0 ? j : 0);
  for (int h = 1; h <= j; ++h)
    f[h - 1] = static_cast<double>(h) / (j + 1);
  return f;
}

inline PhaseFunction rising() { return PhaseFunction::polynomial({0.0, 1.0}); }
inline PhaseFunction falling() { return PhaseFunction::polynomial({1.0, -1.0}); }

/// Linear interpolation with delta = 1/j^alpha (alpha = 1/2 by default).
inline Schedule linear_adiabatic(int j, double alpha = 0.5) {
  if (j < 1)
    throw ArgumentError("step count j must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ArgumentError("delta exponent alpha must lie in (0, 1)");
  Schedule s;
  s.family = "linear_adiabatic";
  s.j = j;
  s.delta_rule = DeltaRule::power;
  s.alpha = alpha;
  s.delta = std::pow(static_cast<double>(j), -alpha);
  s.tau = falling();
  s.rho = rising();
  s.f = linear_grid(j);
  return s;
}

/// Fixed delta independent of j. j = 0 is accepted as a no-op baseline.
inline Schedule constant_delta(int j, double delta, PhaseFunction tau = falling(),
                               PhaseFunction rho = rising()) {
  if (j < 0)
    throw ArgumentError("step count j must be >= 0");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ArgumentError("delta must be positive and finite");
  Schedule s;
  s.family = "constant_delta";
  s.j = j;
  s.delta_rule = DeltaRule::constant;
  s.delta = delta;
  s.tau = std::move(tau);
  s.rho = std::move(rho);
  s.f = linear_grid(j);
  return s;
}

/// Cubic tuned on random 3-SAT at n = 12: p(f) = 1.92708 f - 2.66179 f^2 +
/// 1.73471 f^3, with delta = 1.31275.
inline constexpr double kCubicDelta = 1.31275;
inline const std::vector<double> &cubic_coefficients() {
  static const std::vector<double> c{0.0, 1.92708, -2.66179, 1.73471};
  return c;
}

inline Schedule cubic_schedule(int j) {
  if (j < 1)
    throw ArgumentError("step count j must be >= 1");
  const auto &c = cubic_coefficients();
  auto s = constant_delta(j, kCubicDelta, PhaseFunction::polynomial({1.0, -c[1], -c[2], -c[3]}),
                          PhaseFunction::polynomial(c));
  s.family = "cubic";
  return s;
}

/// One point of a gap curve.
struct GapSample {
  double f = 0.0;
  double gap = 0.0;
};

/// Step positions with local density proportional to 1/g(f)^2.
///
/// F(f) = int_0^f g^-2 / int_0^1 g^-2 with g piecewise linear between the
/// samples (held constant outside them); f_h = F^{-1}(h / (j + 1)).
inline std::vector<double> gap_adapted_grid(int j, std::span<const GapSample> profile) {
  if (profile.empty())
    throw ArgumentError("gap profile is empty");
  std::vector<GapSample> pts(profile.begin(), profile.end());
  std::sort(pts.begin(), pts.end(),
            [](const GapSample &a, const GapSample &b) { return a.f < b.f; });
  for (const auto &p : pts)
    if (!(p.gap > 0.0) || !std::isfinite(p.gap))
      throw ArgumentError("gap values must be positive");
  // Knots covering [0, 1].
  std::vector<double> xs, gs;
  if (pts.front().f > 0.0) {
    xs.push_back(0.0);
    gs.push_back(pts.front().gap);
  }
  for (const auto &p : pts) {
    if (p.f < 0.0 || p.f > 1.0)
      throw ArgumentError("gap profile f outside [0, 1]");
    if (!xs.empty() && p.f == xs.back())
      continue;
    xs.push_back(p.f);
    gs.push_back(p.gap);
  }
  if (xs.back() < 1.0) {
    xs.push_back(1.0);
    gs.push_back(gs.back());
  }
  // Exact integral of 1/g^2 for linear g on each segment:
  // int dx / (a + b x)^2 = h / (g0 g1).
  std::vector<double> cum(xs.size(), 0.0);
  for (std::size_t i = 1; i < xs.size(); ++i)
    cum[i] = cum[i - 1] + (xs[i] - xs[i - 1]) / (gs[i - 1] * gs[i]);
  const double total = cum.back();
  std::vector<double> f(j > 0 ? j : 0);
  std::size_t seg = 1;
  for (int h = 1; h <= j; ++h) {
    const double target = total * h / (j + 1);
    while (seg + 1 < xs.size() && cum[seg] < target)
      ++seg;
    // Invert within segment [seg-1, seg]: with g(t) = g0 + (g1 - g0) t / L,
    // the partial integral to t is t / (g0 g(t)).
    const double L = xs[seg] - xs[seg - 1];
    const double g0 = gs[seg - 1], g1 = gs[seg];
    const double r = target - cum[seg - 1];
    const double slope = (g1 - g0) / L;
    // r = t / (g0 (g0 + slope t))  =>  t = r g0^2 / (1 - r g0 slope)
    double t = r * g0 * g0 / (1.0 - r * g0 * slope);
    t = std::clamp(t, 0.0, L);
    f[h - 1] = xs[seg - 1] + t;
  }
  return f;
}

/// Linear phases on a grid concentrated where the gap is small;
/// delta = 1/j^alpha, or `constant_delta` when positive.
inline Schedule gap_adapted(int j, std::span<const GapSample> profile,
                            double alpha = 0.5, double constant = 0.0) {
  Schedule s = constant > 0.0 ? constant_delta(j, constant) : linear_adiabatic(j, alpha);
  s.family = "gap_adapted";
  s.grid = GridKind::reparameterized;
  s.f = gap_adapted_grid(j, profile);
  return s;
}

/// Caller-supplied phase functions with delta = 1/j.
inline Schedule heuristic_schedule(int j, PhaseFunction tau, PhaseFunction rho) {
  if (j < 1)
    throw ArgumentError("step count j must be >= 1");
  Schedule s;
  s.family = "heuristic";
  s.j = j;
  s.delta_rule = DeltaRule::heuristic;
  s.delta = 1.0 / j;
  s.tau = std::move(tau);
  s.rho = std::move(rho);
  s.f = linear_grid(j);
  return s;
}

/// Preset heuristic phases (a constant-slope family; the coefficients are a
/// local choice, not published values): tau(f) = a j (1 - f), rho(f) = b j f,
/// so the per-step angles are a (1 - f) and b f.
inline constexpr double kHeuristicMixingSlope = 2.5;
inline constexpr double kHeuristicCostSlope = 1.0;

inline Schedule heuristic_preset(int j, double a = kHeuristicMixingSlope,
                                 double b = kHeuristicCostSlope) {
  auto s = heuristic_schedule(j, PhaseFunction::polynomial({a * j, -a * j}),
                              PhaseFunction::polynomial({0.0, b * j}));
  s.family = "heuristic_preset";
  return s;
}

inline nlohmann::json phase_json(const PhaseFunction &p) {
  if (p.is_polynomial())
    return p.coefficients();
  return p.label();
}

inline nlohmann::json to_json(const Schedule &s) {
  nlohmann::json j{{"family", s.family},
                   {"j", s.j},
                   {"delta_rule", to_string(s.delta_rule)},
                   {"delta", s.delta},
                   {"tau", phase_json(s.tau)},
                   {"rho", phase_json(s.rho)},
                   {"grid", to_string(s.grid)}};
  if (s.delta_rule == DeltaRule::power)
    j["alpha"] = s.alpha;
  return j;
}

/// Outcome of one (instance, schedule) run.
struct RunResult {
  double p_soln = 0.0;
  double cost = 0.0; ///< j / p_soln, +infinity when p_soln == 0
  int j = 0;
  double delta = 0.0;
  double norm_drift = 0.0;
  std::vector<double> trace; ///< P_soln after each step, when requested
};

inline double expected_cost(int j, double p_soln) {
  return p_soln > 0.0 ? j / p_soln : std::numeric_limits<double>::infinity();
}

struct RunOptions {
  bool trace = false;
  /// Observer called with (step index h, f_h, state) after each step.
  std::function<void(int, double, const QuantumState &)> observer;
};

/// Runs the schedule from the uniform state and measures P_soln.
inline RunResult run_schedule(const StepKernel &kernel,
                              std::span<const std::uint64_t> solutions,
                              const Schedule &schedule,
                              const RunOptions &opts = {}) {
  if (static_cast<int>(schedule.f.size()) != schedule.j)
    throw ArgumentError("schedule grid size differs from j");
  auto psi = uniform_state(kernel.qubits());
  RunResult r;
  r.j = schedule.j;
  r.delta = schedule.delta;
  if (opts.trace)
    r.trace.reserve(schedule.j);
  for (int h = 0; h < schedule.j; ++h) {
    const double f = schedule.f[h];
    kernel.step(psi, schedule.tau(f), schedule.rho(f), schedule.delta);
    if (opts.trace)
      r.trace.push_back(solution_probability(psi, solutions));
    if (opts.observer)
      opts.observer(h + 1, f, psi);
  }
  r.p_soln = std::clamp(solution_probability(psi, solutions), 0.0, 1.0);
  r.cost = expected_cost(schedule.j, r.p_soln);
  r.norm_drift = psi.norm_drift();
  return r;
}

inline RunResult run_schedule(const Instance &inst, const MixingWeights &weights,
                              const Schedule &schedule,
                              const RunOptions &opts = {}) {
  const auto &sols = inst.solution_list();
  return run_schedule(StepKernel(inst, weights), sols, schedule, opts);
}

} // namespace qsat

#endif // QSAT_SCHEDULE_HPP
