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

// Exact regression identities used as integrity checks.
//
// With pmi = frequency - surprisal, the models
//   y ~ b_s surprisal + b_f frequency + ...
//   y ~ b_p pmi       + b_f' frequency + ...
// span the same column space, so predictions and R^2 agree, b_p = -b_s and
// b_f' = b_f + b_s.

#ifndef CTXREAD_IDENTITIES_H_
#define CTXREAD_IDENTITIES_H_

#include <span>
#include <string>
#include <vector>

#include "ctxread/regression.h"

namespace ctxread {

// One surprisal/frequency/pmi triple, e.g. the current token or its
// spillover copy.
struct PredictorTriple {
  std::string name;  // suffix for column labels, e.g. "" or "prev_"
  std::vector<double> surprisal;
  std::vector<double> frequency;
  std::vector<double> pmi;
};

struct EquivalenceReport {
  struct TripleDeltas {
    std::string name;
    double beta_surprisal = 0.0;
    double beta_pmi = 0.0;
    double beta_frequency_surprisal_model = 0.0;
    double beta_frequency_pmi_model = 0.0;
    // |b_p + b_s| and |b_f' - b_f - b_s|.
    double pmi_delta = 0.0;
    double frequency_shift_delta = 0.0;
  };
  double r2_surprisal = 0.0;
  double r2_pmi = 0.0;
  double r2_delta = 0.0;
  double max_prediction_delta = 0.0;
  std::vector<TripleDeltas> triples;
  bool passed = false;
};

struct EquivalenceTolerance {
  double r2 = 1e-10;
  // Relative to max(1, sd of y).
  double prediction = 1e-10;
  double coefficient = 1e-8;
};

// Fits both models on the same rows. Also checks pmi = frequency - surprisal
// row-wise within 1e-9. Throws IdentityError listing the deltas on failure.
EquivalenceReport EquivalenceCheck(std::span<const PredictorTriple> triples,
                                   const std::vector<Column>& covariates,
                                   std::span<const double> y,
                                   const EquivalenceTolerance& tol = {});

struct ResidualizationReport {
  double beta_a1 = 0.0;  // x1 in y ~ x1 + x2
  double beta_a2 = 0.0;  // x2 in y ~ x1 + x2
  double beta_b1 = 0.0;  // residualized x1 in y ~ r1 + x2
  double beta_b2 = 0.0;  // x2 in y ~ r1 + x2
  double beta_c2 = 0.0;  // x2 in y ~ x2
  bool passed = false;
};

// Residualizes x1 against x2 and compares the three models. Throws
// DegenerateError when x1 vanishes after residualization or x2 is constant.
ResidualizationReport ResidualizationTriplet(std::span<const double> x1,
                                             std::span<const double> x2,
                                             std::span<const double> y,
                                             double tol = 1e-8);

}  // namespace ctxread

#endif  // CTXREAD_IDENTITIES_H_
