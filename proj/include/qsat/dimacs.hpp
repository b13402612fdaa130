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


#ifndef QSAT_DIMACS_HPP
#define QSAT_DIMACS_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsat/errors.hpp"
#include "qsat/sat.hpp"

namespace qsat {

/// DIMACS CNF text. Metadata (seed, sample, solution count) goes into comment
/// lines starting with "c qsat:".
inline std::string write_dimacs(const Instance &inst) {
  std::ostringstream os;
  os << "c qsat: k=" << inst.k << "\n";
  if (inst.meta) {
    os << "c qsat: seed=" << inst.meta->seed << "\n";
    os << "c qsat: sample=" << inst.meta->sample << "\n";
    os << "c qsat: attempt=" << inst.meta->attempt << "\n";
    char mu[32];
    std::snprintf(mu, sizeof mu, "%.17g", inst.meta->mu);
    os << "c qsat: mu=" << mu << "\n";
  }
  if (inst.solutions)
    os << "c qsat: solutions=" << inst.solutions->size() << "\n";
  os << "p cnf " << inst.n << " " << inst.m() << "\n";
  for (const auto &cl : inst.clauses) {
    for (std::size_t i = 0; i < cl.width(); ++i)
      os << (cl.negated[i] ? "-" : "") << (cl.vars[i] + 1) << " ";
    os << "0\n";
  }
  return os.str();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view tok, std::size_t line, const char *what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(line, std::string("bad ") + what + " '" +
                               std::string(tok) + "'");
  return value;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r')
      ++j;
    if (j > i)
      out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

} // namespace detail

/// Parses DIMACS CNF. All clauses must have the same width and distinct
/// variables. The solution list is not restored (only its count is
/// recorded); call enumerate_solutions to repopulate it.
inline Instance read_dimacs(std::string_view text,
                            std::size_t *solution_count = nullptr) {
  Instance inst;
  bool have_header = false;
  std::size_t declared_m = 0;
  int k_meta = -1;
  InstanceMeta meta;
  bool have_meta = false;
  std::vector<std::pair<int, bool>> pending;
  std::size_t pending_line = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos
                                          ? std::string_view::npos
                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line == "%")
      continue;
    if (line.front() == 'c') {
      constexpr std::string_view tag = "c qsat:";
      if (line.substr(0, tag.size()) != tag)
        continue;
      const auto body = detail::trim(line.substr(tag.size()));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos)
        throw ParseError(line_no, "malformed qsat metadata");
      const auto key = body.substr(0, eq);
      const auto val = body.substr(eq + 1);
      if (key == "k") {
        k_meta = detail::parse_number<int>(val, line_no, "k");
      } else if (key == "seed") {
        meta.seed = detail::parse_number<std::uint64_t>(val, line_no, "seed");
        have_meta = true;
      } else if (key == "sample") {
        meta.sample = detail::parse_number<std::uint64_t>(val, line_no, "sample");
        have_meta = true;
      } else if (key == "attempt") {
        meta.attempt =
            detail::parse_number<std::uint64_t>(val, line_no, "attempt");
        have_meta = true;
      } else if (key == "mu") {
        char *end = nullptr;
        const std::string text_mu(val);
        meta.mu = std::strtod(text_mu.c_str(), &end);
        if (text_mu.empty() || *end != '\0')
          throw ParseError(line_no, "bad mu value");
        have_meta = true;
      } else if (key == "solutions") {
        const auto count =
            detail::parse_number<std::size_t>(val, line_no, "solution count");
        if (solution_count)
          *solution_count = count;
      }
      continue;
    }
    if (line.front() == 'p') {
      if (have_header)
        throw ParseError(line_no, "duplicate problem line");
      const auto toks = detail::split_ws(line);
      if (toks.size() != 4 || toks[0] != "p" || toks[1] != "cnf")
        throw ParseError(line_no, "expected 'p cnf <vars> <clauses>'");
      inst.n = detail::parse_number<int>(toks[2], line_no, "variable count");
      declared_m = detail::parse_number<std::size_t>(toks[3], line_no,
                                                     "clause count");
      if (inst.n < 1 || inst.n > 63)
        throw ParseError(line_no, "variable count out of range [1, 63]");
      have_header = true;
      continue;
    }
    if (!have_header)
      throw ParseError(line_no, "clause before problem line");
    for (auto tok : detail::split_ws(line)) {
      const int lit = detail::parse_number<int>(tok, line_no, "literal");
      if (pending.empty())
        pending_line = line_no;
      if (lit == 0) {
        Clause cl;
        for (auto [v, neg] : pending) {
          if (std::find(cl.vars.begin(), cl.vars.end(), v) != cl.vars.end())
            throw ParseError(line_no, "repeated variable in clause");
          cl.vars.push_back(v);
          cl.negated.push_back(neg);
        }
        if (cl.vars.empty())
          throw ParseError(line_no, "empty clause");
        if (!inst.clauses.empty() && cl.width() != inst.clauses.front().width())
          throw ParseError(line_no, "clause width differs from earlier clauses");
        inst.clauses.push_back(std::move(cl));
        pending.clear();
        continue;
      }
      const int v = lit < 0 ? -lit : lit;
      if (v > inst.n)
        throw ParseError(line_no, "literal " + std::string(tok) +
                                      " out of range for " +
                                      std::to_string(inst.n) + " variables");
      pending.emplace_back(v - 1, lit < 0);
    }
  }
  if (!have_header)
    throw ParseError(line_no, "missing problem line");
  if (!pending.empty())
    throw ParseError(pending_line, "clause not terminated by 0");
  if (inst.clauses.size() != declared_m)
    throw ParseError(line_no, "header declares " + std::to_string(declared_m) +
                                  " clauses, found " +
                                  std::to_string(inst.clauses.size()));
  inst.k = inst.clauses.empty() ? std::max(k_meta, 0)
                                : static_cast<int>(inst.clauses.front().width());
  if (k_meta >= 0 && k_meta != inst.k)
    throw ParseError(line_no, "metadata k disagrees with clause width");
  if (have_meta)
    inst.meta = meta;
  return inst;
}

/// One line of an ensemble manifest (JSON lines).
struct ManifestRecord {
  std::string id;
  int n = 0;
  int m = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::uint64_t sample = 0;
  std::size_t solution_count = 0;
  std::string path;
};

inline void to_json(nlohmann::json &j, const ManifestRecord &r) {
  j = nlohmann::json{{"id", r.id},     {"n", r.n},
                     {"m", r.m},       {"k", r.k},
                     {"seed", r.seed}, {"sample", r.sample},
                     {"solution_count", r.solution_count},
                     {"path", r.path}};
}

inline void from_json(const nlohmann::json &j, ManifestRecord &r) {
  j.at("id").get_to(r.id);
  j.at("n").get_to(r.n);
  j.at("m").get_to(r.m);
  j.at("k").get_to(r.k);
  j.at("seed").get_to(r.seed);
  r.sample = j.value("sample", std::uint64_t{0});
  j.at("solution_count").get_to(r.solution_count);
  j.at("path").get_to(r.path);
}

inline ManifestRecord manifest_record(const Instance &inst, std::string path) {
  ManifestRecord r;
  r.id = instance_id(inst);
  r.n = inst.n;
  r.m = static_cast<int>(inst.m());
  r.k = inst.k;
  if (inst.meta) {
    r.seed = inst.meta->seed;
    r.sample = inst.meta->sample;
  }
  r.solution_count = inst.solutions ? inst.solutions->size() : 0;
  r.path = std::move(path);
  return r;
}

} // namespace qsat

#endif // QSAT_DIMACS_HPP
