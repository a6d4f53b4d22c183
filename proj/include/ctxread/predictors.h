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

// Per-token predictors: surprisal, frequency (unigram surprisal), PMI and
// length, all in nats except length (characters).

#ifndef CTXREAD_PREDICTORS_H_
#define CTXREAD_PREDICTORS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxread/corpus.h"
#include "ctxread/lm.h"

namespace ctxread {

double Surprisal(const AutoregressiveLM& lm, std::span<const Symbol> context,
                 Symbol unit);
double Surprisal(const AutoregressiveLM& lm,
                 std::span<const std::string> context, std::string_view unit);
double Frequency(const UnigramLM& q, Symbol unit);
double Frequency(const UnigramLM& q, std::string_view unit);
// frequency - surprisal.
double Pmi(double surprisal, double frequency);

struct PredictorValues {
  double surprisal = 0.0;
  double frequency = 0.0;
  double pmi = 0.0;
  double length = 0.0;
};

struct PredictorRecord {
  std::string doc_id;
  long long token_idx = 0;
  std::string token;
  PredictorValues current;
  // Values of the preceding token in the same document.
  std::optional<PredictorValues> prev;
  std::optional<double> rt_ms;
};

struct ExternalPredictorRow {
  std::string doc_id;
  long long token_idx = 0;
  std::string token;
  double surprisal = 0.0;
  double frequency = 0.0;
};

//   doc_id<TAB>token_idx<TAB>token<TAB>surprisal<TAB>frequency
// Natural-log units. Token indices must increase strictly per document.
struct ExternalPredictorFile {
  std::vector<ExternalPredictorRow> rows;
};

ExternalPredictorFile ParseExternalPredictors(std::string_view tsv);
ExternalPredictorFile ReadExternalPredictors(const std::string& path);

// Tokens are atomic units of the LM; the context of a token is every
// preceding token of its document. `unigram` is usually
// UnigramMinimizer(lm). Throws CoverageError listing tokens outside the
// alphabet.
std::vector<PredictorRecord> BuildPredictorTable(
    const AutoregressiveLM& lm, const UnigramLM& unigram,
    std::span<const CorpusToken> tokens);

// Joins on (doc_id, token_idx); file frequencies are used as given. Throws
// CoverageError listing tokens without a matching row (or with a
// different token text).
std::vector<PredictorRecord> BuildPredictorTable(
    const ExternalPredictorFile& file, std::span<const CorpusToken> tokens);

// Tab-separated dump of a table, one line per record.
std::string FormatPredictorTable(std::span<const PredictorRecord> table);

}  // namespace ctxread

#endif  // CTXREAD_PREDICTORS_H_
