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


#ifndef QSAT_EXPERIMENT_HPP
#define QSAT_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsat/baselines.hpp"
#include "qsat/dimacs.hpp"
#include "qsat/errors.hpp"
#include "qsat/sat.hpp"
#include "qsat/schedule.hpp"
#include "qsat/state.hpp"
#include "qsat/stats.hpp"

namespace qsat {

/// Configuration problems (bad JSON, duplicate labels). The CLI maps these
/// to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Resolves a step-count rule for size n: an integer, "n", "n^p" (nearest
/// integer to n^p) or "c*n^p".
inline int resolve_steps(const std::string &rule, int n) {
  std::string r;
  for (char ch : rule)
    if (ch != ' ')
      r += ch;
  if (r.empty())
    throw ConfigError("empty step rule");
  double scale = 1.0;
  const auto star = r.find('*');
  if (star != std::string::npos) {
    scale = std::stod(r.substr(0, star));
    r = r.substr(star + 1);
  }
  double value;
  if (r == "n") {
    value = n;
  } else if (r.size() > 2 && r[0] == 'n' && r[1] == '^') {
    value = std::pow(static_cast<double>(n), std::stod(r.substr(2)));
  } else {
    std::size_t used = 0;
    value = std::stod(r, &used);
    if (used != r.size())
      throw ConfigError("bad step rule '" + rule + "'");
  }
  const double j = std::round(scale * value);
  if (j < 0 || j > 1e9)
    throw ConfigError("step rule '" + rule + "' out of range");
  return static_cast<int>(j);
}

/// One algorithm in an experiment.
struct MethodConfig {
  std::string label;
  std::string family; ///< linear_adiabatic, constant_delta, cubic, gap_adapted,
                      ///< heuristic_preset, gsat, grover
  std::string steps = "n^2";
  double alpha = 0.5;
  double delta = 1.0;
  double heuristic_a = kHeuristicMixingSlope;
  double heuristic_b = kHeuristicCostSlope;
  WeightMode weights = WeightMode::unweighted;
  std::vector<GapSample> gap_profile;
  int trials = 100;
  long max_flips_per_try = 0;
  long max_tries = 0;

  bool quantum() const { return family != "gsat" && family != "grover"; }
};

struct ExperimentConfig {
  std::vector<int> ns;
  std::map<int, int> instances; ///< per n
  int default_instances = 100;
  EnsembleRule rule;
  std::uint64_t seed = 1;
  std::vector<MethodConfig> methods;
  int threads = 0; ///< 0: QSAT_THREADS or hardware concurrency
  std::string out;
  std::string instances_dir;

  int count_for(int n) const {
    auto it = instances.find(n);
    return it != instances.end() ? it->second : default_instances;
  }
};

inline void validate(const ExperimentConfig &cfg) {
  if (cfg.ns.empty())
    throw ConfigError("config lists no problem sizes");
  for (int n : cfg.ns) {
    if (n < 1 || n > kDefaultQubitLimit)
      throw ConfigError("problem size " + std::to_string(n) + " unsupported");
    if (cfg.count_for(n) < 1)
      throw ConfigError("ensemble size must be >= 1");
  }
  if (cfg.rule.k < 1)
    throw ConfigError("clause width k must be >= 1");
  for (int n : cfg.ns)
    if (cfg.rule.k > n)
      throw ConfigError("clause width k exceeds problem size " + std::to_string(n));
  if (!(cfg.rule.mu > 0.0) && cfg.rule.m < 0)
    throw ConfigError("clause density mu must be positive");
  if (cfg.methods.empty())
    throw ConfigError("config lists no methods");
  std::set<std::string> labels;
  static const std::set<std::string> families{"linear_adiabatic", "constant_delta", "cubic",
                                              "gap_adapted",      "heuristic_preset", "gsat",
                                              "grover"};
  for (const auto &m : cfg.methods) {
    if (m.label.empty())
      throw ConfigError("method without a label");
    if (!labels.insert(m.label).second)
      throw ConfigError("duplicate method label '" + m.label + "'");
    if (!families.count(m.family))
      throw ConfigError("unknown method family '" + m.family + "'");
    if (m.family == "gap_adapted" && m.gap_profile.empty())
      throw ConfigError("gap_adapted method '" + m.label + "' needs a gap_profile");
    if (m.quantum())
      for (int n : cfg.ns)
        (void)resolve_steps(m.steps, n);
  }
}

inline MethodConfig method_from_json(const nlohmann::json &j) {
  MethodConfig m;
  m.label = j.at("label").get<std::string>();
  m.family = j.at("family").get<std::string>();
  if (j.contains("steps")) {
    const auto &s = j.at("steps");
    m.steps = s.is_string() ? s.get<std::string>() : std::to_string(s.get<long>());
  } else if (m.family != "linear_adiabatic" && m.family != "gap_adapted") {
    m.steps = "n";
  }
  m.alpha = j.value("alpha", m.alpha);
  m.delta = j.value("delta", m.delta);
  m.heuristic_a = j.value("a", m.heuristic_a);
  m.heuristic_b = j.value("b", m.heuristic_b);
  if (j.contains("weights"))
    m.weights = weight_mode_from_string(j.at("weights").get<std::string>());
  if (j.contains("gap_profile"))
    for (const auto &p : j.at("gap_profile"))
      m.gap_profile.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  m.trials = j.value("trials", m.trials);
  m.max_flips_per_try = j.value("max_flips_per_try", m.max_flips_per_try);
  m.max_tries = j.value("max_tries", m.max_tries);
  return m;
}

/// Parses the experiment JSON. See configs/ for examples.
inline ExperimentConfig config_from_json(const nlohmann::json &j) {
  try {
    ExperimentConfig cfg;
    cfg.ns = j.at("ns").get<std::vector<int>>();
    if (j.contains("instances")) {
      const auto &inst = j.at("instances");
      if (inst.is_object()) {
        for (auto it = inst.begin(); it != inst.end(); ++it)
          cfg.instances[std::stoi(it.key())] = it.value().get<int>();
        cfg.default_instances = 0;
      } else {
        cfg.default_instances = inst.get<int>();
      }
    }
    cfg.rule.k = j.value("k", 3);
    cfg.rule.mu = j.value("mu", 4.25);
    cfg.rule.m = j.value("m", -1);
    cfg.rule.allow_duplicate_clauses = j.value("allow_duplicate_clauses", true);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.threads = j.value("threads", 0);
    cfg.out = j.value("out", std::string{});
    cfg.instances_dir = j.value("instances_dir", std::string{});
    for (const auto &m : j.at("methods"))
      cfg.methods.push_back(method_from_json(m));
    validate(cfg);
    return cfg;
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ArgumentError &e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

/// One line of the result table.
struct ResultRow {
  std::string instance_id;
  int n = 0;
  int m = 0;
  int k = 0;
  std::size_t n_solutions = 0;
  std::string method;
  int j = 0;
  double delta = 0.0;
  double p_soln = std::nan("");
  double cost = std::nan("");
  double flips = std::nan("");
  double runtime_ms = 0.0;
  double norm_drift = std::nan("");
  std::string flags;

  bool failed() const {
    return flags.find("error") != std::string::npos ||
           flags.find("censored") != std::string::npos ||
           flags.find("drift") != std::string::npos;
  }
};

inline const char *kCsvHeader =
    "instance_id,n,m,k,n_solutions,method,j,delta,p_soln,cost,flips,runtime_ms,norm_drift,flags";

namespace detail {

inline std::string fmt_num(double v) {
  if (std::isnan(v))
    return "";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline double parse_num(const std::string &s) {
  if (s.empty())
    return std::nan("");
  if (s == "inf")
    return std::numeric_limits<double>::infinity();
  if (s == "-inf")
    return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

inline std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string sanitize_flag(std::string s) {
  for (auto &ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r')
      ch = ' ';
  return s;
}

} // namespace detail

inline std::string to_csv_line(const ResultRow &r) {
  using detail::fmt_num;
  std::ostringstream os;
  os << r.instance_id << ',' << r.n << ',' << r.m << ',' << r.k << ',' << r.n_solutions << ','
     << r.method << ',' << r.j << ',' << fmt_num(r.delta) << ',' << fmt_num(r.p_soln) << ','
     << fmt_num(r.cost) << ',' << fmt_num(r.flips) << ',' << fmt_num(r.runtime_ms) << ','
     << fmt_num(r.norm_drift) << ',' << r.flags;
  return os.str();
}

inline ResultRow from_csv_line(const std::string &line, std::size_t line_no = 0) {
  const auto f = detail::split_csv(line);
  if (f.size() != 14)
    throw ParseError(line_no, "expected 14 CSV fields, found " + std::to_string(f.size()));
  try {
    ResultRow r;
    r.instance_id = f[0];
    r.n = std::stoi(f[1]);
    r.m = std::stoi(f[2]);
    r.k = std::stoi(f[3]);
    r.n_solutions = std::stoul(f[4]);
    r.method = f[5];
    r.j = std::stoi(f[6]);
    r.delta = detail::parse_num(f[7]);
    r.p_soln = detail::parse_num(f[8]);
    r.cost = detail::parse_num(f[9]);
    r.flips = detail::parse_num(f[10]);
    r.runtime_ms = detail::parse_num(f[11]);
    r.norm_drift = detail::parse_num(f[12]);
    r.flags = f[13];
    return r;
  } catch (const std::logic_error &e) {
    throw ParseError(line_no, std::string("bad CSV value: ") + e.what());
  }
}

inline void write_csv(std::ostream &os, const std::vector<ResultRow> &rows) {
  os << kCsvHeader << '\n';
  for (const auto &r : rows)
    os << to_csv_line(r) << '\n';
}

inline std::vector<ResultRow> read_csv(std::istream &in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line_no == 1) {
      if (line != kCsvHeader)
        throw ParseError(1, "unexpected CSV header");
      continue;
    }
    rows.push_back(from_csv_line(line, line_no));
  }
  return rows;
}

inline void sort_rows(std::vector<ResultRow> &rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
    return std::tie(a.n, a.instance_id, a.method) < std::tie(b.n, b.instance_id, b.method);
  });
}

/// Worker count: explicit value, else QSAT_THREADS, else hardware threads.
inline int resolve_threads(int requested) {
  if (requested > 0)
    return requested;
  if (const char *env = std::getenv("QSAT_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0)
      return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Applies `fn(i)` for i in [0, count) on a pool of `threads` workers. The
/// first exception thrown by any item is rethrown after the pool drains.
template <class Fn> void parallel_for(std::size_t count, int threads, Fn &&fn) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure)
              failure = std::current_exception();
            next = count;
          }
        }
      });
  }
  if (failure)
    std::rethrow_exception(failure);
}

/// Builds the schedule a quantum method uses at size n.
inline Schedule make_schedule(const MethodConfig &m, int n) {
  const int j = resolve_steps(m.steps, n);
  if (m.family == "linear_adiabatic")
    return linear_adiabatic(j, m.alpha);
  if (m.family == "constant_delta")
    return constant_delta(j, m.delta);
  if (m.family == "cubic")
    return cubic_schedule(j);
  if (m.family == "gap_adapted")
    return gap_adapted(j, m.gap_profile, m.alpha);
  if (m.family == "heuristic_preset")
    return heuristic_preset(j, m.heuristic_a, m.heuristic_b);
  throw ConfigError("method family '" + m.family + "' has no schedule");
}

/// Runs one method on one solved instance. Failures become flags.
inline ResultRow run_method(const Instance &inst, const MethodConfig &m, std::uint64_t seed) {
  ResultRow row;
  row.instance_id = instance_id(inst);
  row.n = inst.n;
  row.m = static_cast<int>(inst.m());
  row.k = inst.k;
  row.n_solutions = inst.solution_list().size();
  row.method = m.label;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> flags;
  try {
    if (m.family == "gsat") {
      GsatConfig gc;
      gc.max_flips_per_try = m.max_flips_per_try;
      gc.max_tries = m.max_tries;
      gc.seed = Rng::substream(seed, fnv1a(row.instance_id), fnv1a(m.label))();
      const auto g = gsat_expected_cost(inst, gc, m.trials);
      row.cost = row.flips = g.mean_flips;
      if (g.censored > 0)
        flags.push_back("censored=" + std::to_string(g.censored));
    } else if (m.family == "grover") {
      const double S = static_cast<double>(row.n_solutions);
      row.j = static_cast<int>(grover_optimal_iterations(inst.n, S));
      row.p_soln = grover_success_prob(inst.n, S, row.j);
      row.cost = grover_expected_cost(inst.n, S);
    } else {
      const auto sched = make_schedule(m, inst.n);
      MixingWeights w;
      try {
        w = make_weights(inst, m.weights);
      } catch (const DegenerateWeightError &) {
        w = unweighted(inst.n);
        flags.push_back("fallback_unweighted");
      }
      const auto r = run_schedule(inst, w, sched);
      row.j = r.j;
      row.delta = r.delta;
      row.p_soln = r.p_soln;
      row.cost = r.cost;
      row.norm_drift = r.norm_drift;
      if (r.p_soln == 0.0)
        flags.push_back("zero_psoln");
      if (r.norm_drift > 1e-9)
        flags.push_back("drift");
    }
  } catch (const std::exception &e) {
    flags.push_back("error:" + detail::sanitize_flag(e.what()));
  }
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  for (std::size_t i = 0; i < flags.size(); ++i)
    row.flags += (i ? ";" : "") + flags[i];
  return row;
}

/// Solved soluble ensemble for size n under the config's rule and seed.
inline std::vector<Instance> ensemble_for(const ExperimentConfig &cfg, int n) {
  return generate_soluble_ensemble(n, cfg.count_for(n), cfg.rule, cfg.seed);
}

/// Writes DIMACS files plus a manifest.jsonl into `dir`.
inline void write_ensemble(const std::string &dir, const std::vector<Instance> &insts,
                           bool append = false);

/// Runs every method on the same instances for each n. Rows already present
/// in `existing` (same instance id and method) are kept and not recomputed.
/// Output is sorted by (n, instance id, method) so it does not depend on the
/// thread count.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg,
                                             std::vector<ResultRow> existing = {},
                                             const std::function<void(const ResultRow &)> &progress = {}) {
  validate(cfg);
  std::set<std::pair<std::string, std::string>> done;
  for (const auto &r : existing)
    done.emplace(r.instance_id, r.method);
  std::vector<ResultRow> rows = std::move(existing);
  const int threads = resolve_threads(cfg.threads);
  std::mutex mu;
  for (int n : cfg.ns) {
    std::vector<Instance> insts(cfg.count_for(n));
    // Solve instances in parallel; slot i depends only on (seed, n, i).
    parallel_for(insts.size(), threads, [&](std::size_t i) {
      insts[i] = generate_soluble_instance(n, cfg.rule, cfg.seed, i);
    });
    if (!cfg.instances_dir.empty())
      write_ensemble(cfg.instances_dir, insts, n != cfg.ns.front());
    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t i = 0; i < insts.size(); ++i)
      for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
        if (!done.count({instance_id(insts[i]), cfg.methods[mi].label}))
          work.emplace_back(i, mi);
    std::vector<ResultRow> fresh(work.size());
    parallel_for(work.size(), threads, [&](std::size_t w) {
      const auto [i, mi] = work[w];
      fresh[w] = run_method(insts[i], cfg.methods[mi], cfg.seed);
      if (progress) {
        std::lock_guard lock(mu);
        progress(fresh[w]);
      }
    });
    rows.insert(rows.end(), std::make_move_iterator(fresh.begin()),
                std::make_move_iterator(fresh.end()));
  }
  sort_rows(rows);
  return rows;
}

inline void write_ensemble(const std::string &dir, const std::vector<Instance> &insts,
                           bool append) {
  std::ofstream manifest(dir + "/manifest.jsonl", append ? std::ios::app : std::ios::trunc);
  if (!manifest)
    throw std::runtime_error("cannot write manifest in '" + dir + "'");
  for (const auto &inst : insts) {
    const std::string name = instance_id(inst) + ".cnf";
    std::ofstream f(dir + "/" + name);
    if (!f)
      throw std::runtime_error("cannot write '" + dir + "/" + name + "'");
    f << write_dimacs(inst);
    manifest << nlohmann::json(manifest_record(inst, name)).dump() << '\n';
  }
}

/// Median summary of one method at one n.
struct MethodSummary {
  std::string method;
  int n = 0;
  std::size_t count = 0;
  MedianCI p_soln;
  MedianCI cost;
};

inline std::vector<MethodSummary> summarize(const std::vector<ResultRow> &rows) {
  std::map<std::pair<std::string, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto &r : rows) {
    auto &g = groups[{r.method, r.n}];
    if (!std::isnan(r.p_soln))
      g.first.push_back(r.p_soln);
    if (!std::isnan(r.cost))
      g.second.push_back(r.cost);
  }
  std::vector<MethodSummary> out;
  for (const auto &[key, vals] : groups) {
    MethodSummary s;
    s.method = key.first;
    s.n = key.second;
    s.count = std::max(vals.first.size(), vals.second.size());
    if (!vals.first.empty())
      s.p_soln = median_ci(vals.first);
    if (!vals.second.empty())
      s.cost = median_ci(vals.second);
    out.push_back(s);
  }
  return out;
}

} // namespace qsat

#endif // QSAT_EXPERIMENT_HPP
