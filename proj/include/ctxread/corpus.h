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

// Word-level reading-time corpora.
//
//   participant<TAB>doc_id<TAB>sentence_id<TAB>token_idx<TAB>token<TAB>rt_ms<TAB>skipped
//
// One row per (participant, token). `skipped` is 0 or 1; the RT of a
// skipped row is ignored and may be empty or NA. Reading times are in
// milliseconds and are never log-transformed.

#ifndef CTXREAD_CORPUS_H_
#define CTXREAD_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctxread {

struct TokenObservation {
  std::string participant;
  std::string doc_id;
  std::string sentence_id;
  long long token_idx = 0;
  std::string token;
  std::optional<double> rt_ms;  // absent when skipped
  bool skipped = false;
};

struct RowIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParsedCorpus {
  std::vector<TokenObservation> observations;
  std::vector<RowIssue> issues;
};

// Malformed rows are collected in `issues` and dropped. Throws FormatError
// for a missing header column, or when more than `max_bad_fraction` of the
// data rows are malformed.
ParsedCorpus ParseCorpus(std::string_view tsv, double max_bad_fraction = 0.05);
ParsedCorpus ReadCorpus(const std::string& path, double max_bad_fraction = 0.05);
std::string FormatCorpus(std::span<const TokenObservation> observations);

struct AggregatedToken {
  std::string doc_id;
  long long token_idx = 0;
  std::string token;
  double mean_rt_ms = 0.0;
  std::size_t contributors = 0;
};

// Mean RT per (doc, token index) over participants who did not skip the
// token. Tokens skipped by everyone are dropped. Sorted by (doc, index).
std::vector<AggregatedToken> AggregateParticipants(
    std::span<const TokenObservation> observations);

// A token of the running text, with its aggregated RT when one exists.
struct CorpusToken {
  std::string doc_id;
  long long token_idx = 0;
  std::string token;
  std::optional<double> rt_ms;
};

// Every distinct (doc, index) token, including ones skipped by everyone,
// sorted by (doc, index). These define the contexts for LM predictors.
std::vector<CorpusToken> CorpusTokens(
    std::span<const TokenObservation> observations);

// Mean and (n - 1) standard deviation of a training column.
struct Standardizer {
  double mean = 0.0;
  double sd = 1.0;

  double Apply(double x) const { return (x - mean) / sd; }
  std::vector<double> Apply(std::span<const double> column) const;
};

// Throws DegenerateError for columns with fewer than two distinct values.
Standardizer FitStandardizer(std::span<const double> column);
std::vector<double> Standardize(std::span<const double> column);

struct FoldAssignment {
  std::vector<std::size_t> fold;  // per row, in [0, k)
  std::size_t k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> TestRows(std::size_t f) const;
  std::vector<std::size_t> TrainRows(std::size_t f) const;
  std::vector<std::size_t> FoldSizes() const;
};

// Seeded shuffle of rows into k folds whose sizes differ by at most one.
FoldAssignment KFold(std::size_t n_rows, std::size_t k, std::uint64_t seed);

// Same, but whole groups (e.g. documents) move together; folds are
// balanced in the number of groups.
FoldAssignment GroupKFold(std::span<const std::string> groups, std::size_t k,
                          std::uint64_t seed);

}  // namespace ctxread

#endif  // CTXREAD_CORPUS_H_
