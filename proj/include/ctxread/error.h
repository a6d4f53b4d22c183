/*
 * Copyright 2026 The ctxread Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CTXREAD_ERROR_H_
#define CTXREAD_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctxread {

// Broad failure classes. Each maps onto one process exit code of the CLI.
enum class ErrorKind {
  kConfig,     // bad configuration or unreadable/unwritable path
  kFormat,     // malformed input file
  kIdentity,   // an algebraic identity failed beyond tolerance
  kCoverage,   // tokens or symbols that the predictor source cannot resolve
  kNumerical,  // divergence, non-convergence, degeneracy, rank deficiency
};

int ExitCode(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorKind::kFormat, what) {}
};

// Unknown unit or EOS symbol passed to a language model.
class SymbolError : public Error {
 public:
  explicit SymbolError(const std::string& symbol)
      : Error(ErrorKind::kCoverage, "unknown symbol '" + symbol + "'"),
        symbol_(symbol) {}
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

class CoverageError : public Error {
 public:
  CoverageError(const std::string& what, std::vector<std::string> missing)
      : Error(ErrorKind::kCoverage, what), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

class IdentityError : public Error {
 public:
  explicit IdentityError(const std::string& what)
      : Error(ErrorKind::kIdentity, what) {}
};

// Truncated enumeration could not account for enough probability mass.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double remaining_mass)
      : Error(ErrorKind::kNumerical, what), remaining_mass_(remaining_mass) {}
  double remaining_mass() const { return remaining_mass_; }

 private:
  double remaining_mass_;
};

// Infinite expected string length.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double spectral_radius)
      : Error(ErrorKind::kNumerical, what), spectral_radius_(spectral_radius) {}
  double spectral_radius() const { return spectral_radius_; }

 private:
  double spectral_radius_;
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what,
                      std::vector<std::string> dependent_columns)
      : Error(ErrorKind::kNumerical, what),
        dependent_columns_(std::move(dependent_columns)) {}
  const std::vector<std::string>& dependent_columns() const {
    return dependent_columns_;
  }

 private:
  std::vector<std::string> dependent_columns_;
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

}  // namespace ctxread

#endif  // CTXREAD_ERROR_H_
