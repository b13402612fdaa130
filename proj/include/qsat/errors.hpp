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

#ifndef QSAT_ERRORS_HPP
#define QSAT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsat {

/// Invalid argument supplied by the caller (bad index, bad parameter range).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Request exceeds a configured size limit (qubit count, dense matrix size).
class CapabilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Object is missing data the operation needs, e.g. an unsolved instance.
class StateError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Mixing weights that break the uniqueness of the mixing ground state.
class DegenerateWeightError : public ArgumentError {
public:
  using ArgumentError::ArgumentError;
};

/// Malformed input text. Carries the 1-based line number of the problem.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string &what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Iterative numerical method failed to converge.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string &what, double f, std::size_t iterations)
      : std::runtime_error(what + " (f=" + std::to_string(f) +
                           ", iterations=" + std::to_string(iterations) + ")"),
        f_(f), iterations_(iterations) {}

  double f() const noexcept { return f_; }
  std::size_t iterations() const noexcept { return iterations_; }

private:
  double f_;
  std::size_t iterations_;
};

} // namespace qsat

#endif // QSAT_ERRORS_HPP
