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

// Synthetic reading-time corpora with known generating coefficients.
//
// Documents are sampled from an LM (units only, EOS suppressed), predictors
// are computed exactly from the same LM, and each participant's RT is
//
//   rt = intercept + sum_j coef_j * x_j + noise_sd * N(0, 1)
//
// with x_j drawn from surprisal, frequency, pmi, length and their prev_
// copies (prev_ terms are zero on document-initial tokens).

#ifndef CTXREAD_SYNTHETIC_H_
#define CTXREAD_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ctxread/corpus.h"
#include "ctxread/lm.h"
#include "ctxread/predictors.h"

namespace ctxread {

struct SyntheticOptions {
  // Keys: intercept, surprisal, frequency, pmi, length and prev_* variants.
  std::map<std::string, double> true_coeffs = {{"intercept", 200.0}};
  double noise_sd = 1.0;
  std::size_t n_docs = 10;
  std::size_t doc_len = 50;
  std::size_t participants = 1;
  // Probability that a participant skips a token.
  double skip_prob = 0.0;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<TokenObservation> observations;
  std::vector<PredictorRecord> table;
  // JSON: {true_coeffs, noise_sd, seed, n_docs, doc_len, participants,
  // skip_prob}.
  std::string sidecar;
};

// Throws ConfigError for unknown coefficient names, noise_sd <= 0, or a
// generated negative RT.
SyntheticCorpus GenerateSynthetic(const AutoregressiveLM& lm,
                                  const SyntheticOptions& options);

// Names accepted in SyntheticOptions::true_coeffs.
const std::vector<std::string>& SyntheticCoefficientNames();

}  // namespace ctxread

#endif  // CTXREAD_SYNTHETIC_H_
