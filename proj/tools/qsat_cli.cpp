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


// qsat: ensemble generation, experiment runs, spectra, baselines and fits.
//
//   qsat gen -n 12 --count 100 --seed 7 --out instances/
//   qsat run --config configs/fig1.json --out fig1.csv
//   qsat gap -n 10 --count 20 --out gaps/
//   qsat baseline -n 10 -n 12 --out baseline.csv
//   qsat fit fig1.csv --method lin_n2
//   qsat appendix --delta 4 --jmax 4096 --out appendix/
//
// Exit codes: 0 success, 1 a row or instance was flagged, 2 usage or config error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qsat/qsat.hpp"

namespace fs = std::filesystem;
using namespace qsat;

namespace {

constexpr int kExitFlagged = 1;
constexpr int kExitUsage = 2;

void ensure_dir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw ConfigError("cannot create directory '" + dir + "': " + ec.message());
}

void ensure_parent(const std::string &path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty())
    ensure_dir(parent.string());
}

std::ofstream open_out(const std::string &path) {
  ensure_parent(path);
  std::ofstream os(path);
  if (!os)
    throw ConfigError("cannot write '" + path + "'");
  return os;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

EnsembleRule rule_from(const std::string &config) {
  if (config.empty())
    return EnsembleRule{};
  return load_config(config).rule;
}

struct GenArgs {
  int n = 0;
  int count = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = ".";
  std::string config;
};

int cmd_gen(const GenArgs &a) {
  const auto rule = rule_from(a.config);
  ensure_dir(a.out);
  std::vector<Instance> insts(a.count);
  parallel_for(insts.size(), resolve_threads(a.threads), [&](std::size_t i) {
    insts[i] = generate_soluble_instance(a.n, rule, a.seed, i);
  });
  write_ensemble(a.out, insts);
  std::cout << "wrote " << insts.size() << " instances to " << a.out << "\n";
  return 0;
}

struct RunArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
  bool resume = false;
  bool quiet = false;
};

int cmd_run(const RunArgs &a) {
  auto cfg = load_config(a.config);
  if (!a.out.empty())
    cfg.out = a.out;
  if (a.seed_set)
    cfg.seed = a.seed;
  if (a.threads >= 0)
    cfg.threads = a.threads;
  if (cfg.out.empty())
    throw ConfigError("no output path: set \"out\" in the config or pass --out");
  if (!cfg.instances_dir.empty())
    ensure_dir(cfg.instances_dir);

  std::vector<ResultRow> existing;
  if (a.resume && fs::exists(cfg.out)) {
    std::ifstream in(cfg.out);
    existing = read_csv(in);
    std::cerr << "resuming with " << existing.size() << " rows\n";
  }
  std::size_t done = 0;
  const auto rows = run_experiment(cfg, std::move(existing), [&](const ResultRow &r) {
    ++done;
    if (!a.quiet && (r.failed() || done % 100 == 0))
      std::cerr << done << " rows, last " << r.instance_id << " " << r.method
                << (r.flags.empty() ? "" : " [" + r.flags + "]") << "\n";
  });
  auto os = open_out(cfg.out);
  write_csv(os, rows);

  std::size_t failed = 0;
  for (const auto &r : rows)
    failed += r.failed();
  for (const auto &s : summarize(rows))
    std::cout << s.method << " n=" << s.n << " count=" << s.count
              << " median_p_soln=" << num(s.p_soln.median) << " median_cost=" << num(s.cost.median)
              << "\n";
  if (failed) {
    std::cerr << failed << " of " << rows.size() << " rows flagged\n";
    return kExitFlagged;
  }
  return 0;
}

struct FitArgs {
  std::string csv;
  std::string method;
  std::string out;
  double level = 0.95;
};

nlohmann::json fit_json(const Fit &f) {
  return {{"a", f.a}, {"b", f.b}, {"residual", f.residual}};
}

int cmd_fit(const FitArgs &a) {
  std::ifstream in(a.csv);
  if (!in)
    throw ConfigError("cannot read '" + a.csv + "'");
  std::vector<ResultRow> rows;
  for (auto &r : read_csv(in))
    if (r.method == a.method)
      rows.push_back(std::move(r));
  if (rows.empty())
    throw ConfigError("no rows for method '" + a.method + "' in " + a.csv);

  std::map<int, std::vector<double>> cost, psoln;
  for (const auto &r : rows) {
    if (std::isfinite(r.cost))
      cost[r.n].push_back(r.cost);
    if (std::isfinite(r.p_soln))
      psoln[r.n].push_back(r.p_soln);
  }
  nlohmann::json report;
  report["method"] = a.method;
  report["level"] = a.level;
  std::vector<double> ns, meds;
  for (const auto &[n, v] : cost) {
    const auto ci = median_ci(v, a.level);
    nlohmann::json pt = {{"n", n}, {"count", v.size()}, {"median_cost", ci.median}};
    if (ci.interval_defined) {
      pt["cost_lo"] = ci.lo;
      pt["cost_hi"] = ci.hi;
    }
    if (psoln.count(n))
      pt["median_p_soln"] = median(psoln[n]);
    report["points"].push_back(pt);
    ns.push_back(n);
    meds.push_back(ci.median);
  }
  if (ns.size() >= 3) {
    const auto fe = fit_exponential(ns, meds);
    const auto fp = fit_powerlaw(ns, meds);
    report["exponential"] = fit_json(fe);
    report["powerlaw"] = fit_json(fp);
    report["preferred"] = fe.residual <= fp.residual ? "exponential" : "powerlaw";
  } else {
    report["warning"] = "fewer than 3 sizes; no fit";
  }
  const std::string text = report.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    auto os = open_out(a.out);
    os << text;
  }
  return ns.size() >= 3 ? 0 : kExitFlagged;
}

struct GapArgs {
  std::vector<int> ns;
  int count = 10;
  std::uint64_t seed = 1;
  int threads = 0;
  int points = 101;
  int levels = 6;
  int refine_rounds = 3;
  int refine_factor = 10;
  std::string weights = "unweighted";
  std::string out = ".";
  std::string config;
};

int cmd_gap(const GapArgs &a) {
  const auto rule = rule_from(a.config);
  const auto mode = weight_mode_from_string(a.weights);
  GapOptions opts;
  opts.levels = a.levels;
  opts.refine_rounds = a.refine_rounds;
  opts.refine_factor = a.refine_factor;
  const auto grid = uniform_f_grid(a.points);
  ensure_dir(a.out);

  auto summary = open_out(a.out + "/summary.csv");
  summary << "instance_id,n,m,n_solutions,min_gap,f_star,refinement_depth,max_cost_jump,flags\n";
  std::mutex mu;
  int flagged = 0;
  for (int n : a.ns) {
    std::vector<Instance> insts(a.count);
    const int threads = resolve_threads(a.threads);
    parallel_for(insts.size(), threads, [&](std::size_t i) {
      insts[i] = generate_soluble_instance(n, rule, a.seed, i);
    });
    std::vector<std::string> lines(insts.size());
    parallel_for(insts.size(), threads, [&](std::size_t i) {
      const auto &inst = insts[i];
      const std::string id = instance_id(inst);
      std::string flags;
      SpectrumProfile prof;
      try {
        MixingWeights w;
        try {
          w = make_weights(inst, mode);
        } catch (const DegenerateWeightError &) {
          w = unweighted(n);
          flags = "fallback_unweighted";
        }
        prof = gap_profile(inst, w, grid, opts);
        std::ofstream os(a.out + "/" + id + ".csv");
        write_profile_csv(os, prof);
      } catch (const std::exception &e) {
        flags += (flags.empty() ? "" : ";") + ("error:" + detail::sanitize_flag(e.what()));
      }
      lines[i] = id + "," + std::to_string(n) + "," + std::to_string(inst.m()) + "," +
                 std::to_string(inst.solution_list().size()) + "," + num(prof.min_gap) + "," +
                 num(prof.f_star) + "," + std::to_string(prof.refinement_depth) + "," +
                 num(prof.max_cost_jump) + "," + flags;
      std::lock_guard lock(mu);
      if (flags.find("error") != std::string::npos)
        ++flagged;
    });
    for (const auto &l : lines)
      summary << l << "\n";
    std::cout << "n=" << n << ": " << insts.size() << " profiles\n";
  }
  return flagged ? kExitFlagged : 0;
}

struct BaselineArgs {
  std::vector<int> ns;
  int count = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  int trials = 100;
  long max_flips = 0;
  long max_tries = 0;
  std::string out = "baseline.csv";
  std::string config;
};

int cmd_baseline(const BaselineArgs &a) {
  ExperimentConfig cfg;
  cfg.rule = rule_from(a.config);
  cfg.ns = a.ns;
  cfg.default_instances = a.count;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  MethodConfig gsat;
  gsat.label = "gsat";
  gsat.family = "gsat";
  gsat.trials = a.trials;
  gsat.max_flips_per_try = a.max_flips;
  gsat.max_tries = a.max_tries;
  MethodConfig grover;
  grover.label = grover.family = "grover";
  cfg.methods = {gsat, grover};
  const auto rows = run_experiment(cfg);
  auto os = open_out(a.out);
  write_csv(os, rows);
  std::size_t failed = 0;
  for (const auto &r : rows)
    failed += r.failed();
  for (const auto &s : summarize(rows))
    std::cout << s.method << " n=" << s.n << " median_cost=" << num(s.cost.median) << "\n";
  return failed ? kExitFlagged : 0;
}

struct AppendixArgs {
  std::vector<double> deltas{1.0, 4.0};
  int jmax = 4096;
  int trace_jmax = 256;
  std::string out = ".";
};

int cmd_appendix(const AppendixArgs &a) {
  if (a.jmax < 1)
    throw ConfigError("--jmax must be positive");
  ensure_dir(a.out);
  const auto inst = two_level_example();
  const auto w = unweighted(1);
  auto psoln = open_out(a.out + "/psoln.csv");
  psoln << "delta,j,p_soln\n";
  for (double d : a.deltas) {
    for (int j = 1; j <= a.jmax; j *= 2)
      psoln << num(d) << "," << j << "," << num(run_schedule(inst, w, constant_delta(j, d)).p_soln)
            << "\n";
    // Eigenphase traces for the smaller j.
    for (int j = 4; j <= std::min(a.jmax, a.trace_jmax); j *= 4) {
      const auto tr = adiabatic_trace(inst, w, constant_delta(j, d));
      std::ofstream os(a.out + "/trace_delta" + num(d) + "_j" + std::to_string(j) + ".csv");
      os << "h,f,theta_1,theta_2,overlap_1,overlap_2,p_soln\n";
      for (std::size_t h = 0; h < tr.f.size(); ++h) {
        os << h << "," << num(tr.f[h]);
        for (double t : tr.theta[h])
          os << "," << num(t);
        for (double o : tr.overlap[h])
          os << "," << num(o);
        os << "," << num(tr.p_trace[h]) << "\n";
      }
      for (const auto &warn : tr.warnings)
        std::cerr << "delta=" << num(d) << " j=" << j << ": " << warn << "\n";
    }
  }
  std::cout << "wrote " << a.out << "/psoln.csv\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stepped adiabatic evolution on random 3-SAT"};
  app.require_subcommand(1);

  GenArgs gen;
  auto *g = app.add_subcommand("gen", "Generate a soluble ensemble as DIMACS files");
  g->add_option("-n", gen.n, "Number of variables")->required()->check(CLI::Range(1, 40));
  g->add_option("--count", gen.count, "Instances")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "Ensemble seed");
  g->add_option("--threads", gen.threads, "Worker threads (0: QSAT_THREADS or all cores)");
  g->add_option("--out", gen.out, "Output directory");
  g->add_option("--config", gen.config, "Experiment config supplying the ensemble rule");

  RunArgs run;
  auto *r = app.add_subcommand("run", "Run an experiment config and write the result CSV");
  r->add_option("--config", run.config, "Experiment config (JSON)")->required();
  r->add_option("--out", run.out, "Result CSV (overrides the config)");
  r->add_option("--seed", run.seed, "Seed (overrides the config)")
      ->each([&](const std::string &) { run.seed_set = true; });
  r->add_option("--threads", run.threads, "Worker threads (overrides the config)");
  r->add_flag("--resume", run.resume, "Keep rows already in the output CSV");
  r->add_flag("--quiet", run.quiet, "No progress output");

  FitArgs fit;
  auto *f = app.add_subcommand("fit", "Fit median cost against n for one method");
  f->add_option("csv", fit.csv, "Result CSV")->required();
  f->add_option("--method", fit.method, "Method label")->required();
  f->add_option("--out", fit.out, "JSON report (default stdout)");
  f->add_option("--level", fit.level, "Confidence level")->check(CLI::Range(0.5, 0.999));

  GapArgs gap;
  auto *gp = app.add_subcommand("gap", "Spectrum profiles and minimum gaps");
  gp->add_option("-n", gap.ns, "Number of variables (repeatable)")->required();
  gp->add_option("--count", gap.count, "Instances per n")->check(CLI::PositiveNumber);
  gp->add_option("--seed", gap.seed, "Ensemble seed");
  gp->add_option("--threads", gap.threads, "Worker threads");
  gp->add_option("--points", gap.points, "Uniform f grid points")->check(CLI::Range(2, 100000));
  gp->add_option("--levels", gap.levels, "Lowest levels to track")->check(CLI::Range(2, 64));
  gp->add_option("--refine-rounds", gap.refine_rounds, "Refinement rounds");
  gp->add_option("--refine-factor", gap.refine_factor, "Refinement subdivision");
  gp->add_option("--weights", gap.weights, "unweighted, clause_count or normalized");
  gp->add_option("--out", gap.out, "Output directory");
  gp->add_option("--config", gap.config, "Experiment config supplying the ensemble rule");

  BaselineArgs base;
  auto *b = app.add_subcommand("baseline", "GSAT and unstructured-search costs");
  b->add_option("-n", base.ns, "Number of variables (repeatable)")->required();
  b->add_option("--count", base.count, "Instances per n")->check(CLI::PositiveNumber);
  b->add_option("--seed", base.seed, "Ensemble seed");
  b->add_option("--threads", base.threads, "Worker threads");
  b->add_option("--trials", base.trials, "GSAT trials per instance")->check(CLI::PositiveNumber);
  b->add_option("--max-flips", base.max_flips, "Flips per try (0: n)");
  b->add_option("--max-tries", base.max_tries, "Tries per trial (0: 1000 n)");
  b->add_option("--out", base.out, "Result CSV");
  b->add_option("--config", base.config, "Experiment config supplying the ensemble rule");

  AppendixArgs appx;
  auto *ap = app.add_subcommand("appendix", "Two-level example: P_soln(j) and eigenphase traces");
  ap->add_option("--delta", appx.deltas, "Step size (repeatable)");
  ap->add_option("--jmax", appx.jmax, "Largest j (powers of two from 1)");
  ap->add_option("--trace-jmax", appx.trace_jmax, "Largest j with an eigenphase trace");
  ap->add_option("--out", appx.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g)
      return cmd_gen(gen);
    if (*r)
      return cmd_run(run);
    if (*f)
      return cmd_fit(fit);
    if (*gp)
      return cmd_gap(gap);
    if (*b)
      return cmd_baseline(base);
    if (*ap)
      return cmd_appendix(appx);
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFlagged;
  }
  return kExitUsage;
}
