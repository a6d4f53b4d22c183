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

// Exact-enumeration self checks for an LM.

#ifndef CTXREAD_ORACLE_H_
#define CTXREAD_ORACLE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ctxread/lm.h"

namespace ctxread {

struct OracleCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string detail;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  double expected_length = 0.0;
  double normalizer = 0.0;
  // Unenumerated normalized context mass.
  double tail_mass = 0.0;
  // Rows of the enumerated measure table.
  std::size_t rows = 0;
  // Projection coefficient of centered surprisal on centered frequency.
  double alpha = 0.0;

  bool passed() const;
  std::string Json() const;
};

// Checks, in order: normalizer identity (Z of the prefix measure equals
// that of the unigram minimizer and enumeration sums to 1), prefix mass
// (enumerated contexts carry between 1 - 1e-6 and 1), expected length
// against enumeration plus its exact tail, minimizer optimality against
// `kl_trials` random perturbations, and orthogonality of residualized
// surprisal to frequency under the measure. Throws ConvergenceError when
// the budget leaves more than tail_tol unaccounted for.
OracleReport RunOracle(const AutoregressiveLM& lm,
                       const EnumerationBudget& budget,
                       std::size_t kl_trials = 1000, std::uint64_t seed = 1);

}  // namespace ctxread

#endif  // CTXREAD_ORACLE_H_
