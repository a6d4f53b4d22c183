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

// Run configuration: a key=value text file, one setting per line, `#`
// comments. Command-line flags are applied on top with the same keys.
//
//   lm = data/bigram.tsv
//   corpus = runs/gen/corpus.tsv
//   out = runs/analysis
//   seed = 7
//   predictors = surprisal,pmi,ortho
//   coef.frequency = 40

#ifndef CTXREAD_CONFIG_H_
#define CTXREAD_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "ctxread/analysis.h"
#include "ctxread/lm.h"
#include "ctxread/synthetic.h"

namespace ctxread {

struct RunConfig {
  std::string lm;
  std::string predictors_file;
  std::string corpus;
  std::string out;
  std::uint64_t seed = 1;
  AnalysisOptions analysis;
  EnumerationBudget budget;
  SyntheticOptions synthetic;
  std::size_t kl_trials = 1000;
  // Endpoints of analysis.lambda_grid, kept so they can be set separately.
  double lambda_min = 1e-4;
  double lambda_max = 1e4;
  std::size_t lambda_count = 17;
  double max_bad_fraction = 0.05;
};

// Throws ConfigError for unknown keys or malformed values.
void ApplySetting(RunConfig& config, std::string_view key,
                  std::string_view value);
RunConfig ParseConfig(std::string_view text);
RunConfig LoadConfig(const std::string& path);

// Re-derives seed-dependent fields after the seed changes.
void SetSeed(RunConfig& config, std::uint64_t seed);

// Every effective setting as sorted key=value lines; equal configurations
// serialize identically.
std::string CanonicalConfig(const RunConfig& config);

// Throws ConfigError unless exactly one predictor source is set and the
// numeric settings are in range.
void ValidateForAnalysis(const RunConfig& config);

}  // namespace ctxread

#endif  // CTXREAD_CONFIG_H_
