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

#include "ctxread/corpus.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <utility>

#include "ctxread/error.h"
#include "ctxread/io.h"
#include "ctxread/numeric.h"
#include "ctxread/random.h"

namespace ctxread {
namespace {

constexpr std::array<std::string_view, 7> kColumns = {
    "participant", "doc_id", "sentence_id", "token_idx",
    "token",       "rt_ms",  "skipped"};

using TokenKey = std::pair<std::string, long long>;

bool IsMissing(std::string_view field) {
  return field.empty() || field == "NA" || field == "NaN" || field == "nan";
}

}  // namespace

ParsedCorpus ParseCorpus(std::string_view tsv, double max_bad_fraction) {
  const auto lines = SplitLines(tsv);
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  if (first == lines.size()) throw FormatError("corpus is empty");

  const auto header = SplitTabs(lines[first]);
  std::array<std::size_t, kColumns.size()> col{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) {
      throw FormatError("corpus header lacks column '" +
                        std::string(kColumns[c]) + "'");
    }
    col[c] = static_cast<std::size_t>(it - header.begin());
  }

  ParsedCorpus out;
  std::size_t data_rows = 0;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    ++data_rows;
    const std::size_t line_no = i + 1;
    const auto fields = SplitTabs(lines[i]);
    if (fields.size() != header.size()) {
      out.issues.push_back({line_no, "expected " +
                                         std::to_string(header.size()) +
                                         " fields, found " +
                                         std::to_string(fields.size())});
      continue;
    }
    TokenObservation obs;
    obs.participant = fields[col[0]];
    obs.doc_id = fields[col[1]];
    obs.sentence_id = fields[col[2]];
    obs.token = fields[col[4]];
    if (!ParseInt(fields[col[3]], &obs.token_idx)) {
      out.issues.push_back({line_no, "token_idx '" +
                                         std::string(fields[col[3]]) +
                                         "' is not an integer"});
      continue;
    }
    const std::string_view skipped = fields[col[6]];
    if (skipped != "0" && skipped != "1") {
      out.issues.push_back(
          {line_no, "skipped '" + std::string(skipped) + "' is not 0 or 1"});
      continue;
    }
    obs.skipped = skipped == "1";
    if (!obs.skipped) {
      double rt = 0.0;
      const std::string_view field = fields[col[5]];
      if (IsMissing(field) || !ParseDouble(field, &rt)) {
        out.issues.push_back(
            {line_no, "rt_ms '" + std::string(field) + "' is not numeric"});
        continue;
      }
      if (rt < 0.0) {
        out.issues.push_back({line_no, "rt_ms is negative"});
        continue;
      }
      obs.rt_ms = rt;
    }
    out.observations.push_back(std::move(obs));
  }
  if (data_rows > 0 &&
      static_cast<double>(out.issues.size()) >
          max_bad_fraction * static_cast<double>(data_rows)) {
    const auto& f = out.issues.front();
    throw FormatError(std::to_string(out.issues.size()) + " of " +
                      std::to_string(data_rows) +
                      " corpus rows are malformed (first at line " +
                      std::to_string(f.line) + ": " + f.message + ")");
  }
  return out;
}

ParsedCorpus ReadCorpus(const std::string& path, double max_bad_fraction) {
  const std::string text = ReadFile(path);
  try {
    return ParseCorpus(text, max_bad_fraction);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string FormatCorpus(std::span<const TokenObservation> observations) {
  std::string out;
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    if (c) out += '\t';
    out += kColumns[c];
  }
  out += '\n';
  for (const auto& o : observations) {
    out += o.participant + '\t' + o.doc_id + '\t' + o.sentence_id + '\t' +
           std::to_string(o.token_idx) + '\t' + o.token + '\t' +
           (o.skipped || !o.rt_ms ? std::string("NA")
                                  : FormatDouble(*o.rt_ms)) +
           '\t' + (o.skipped ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<AggregatedToken> AggregateParticipants(
    std::span<const TokenObservation> observations) {
  struct Acc {
    std::string token;
    std::vector<double> rts;
  };
  std::map<TokenKey, Acc> acc;
  for (const auto& o : observations) {
    auto& a = acc[{o.doc_id, o.token_idx}];
    if (a.token.empty()) a.token = o.token;
    if (!o.skipped && o.rt_ms) a.rts.push_back(*o.rt_ms);
  }
  std::vector<AggregatedToken> out;
  for (auto& [key, a] : acc) {
    if (a.rts.empty()) continue;
    out.push_back({key.first, key.second, a.token, Mean(a.rts), a.rts.size()});
  }
  return out;
}

std::vector<CorpusToken> CorpusTokens(
    std::span<const TokenObservation> observations) {
  std::map<TokenKey, std::string> text;
  for (const auto& o : observations) text.emplace(TokenKey{o.doc_id, o.token_idx}, o.token);
  std::map<TokenKey, double> rt;
  for (const auto& a : AggregateParticipants(observations)) {
    rt.emplace(TokenKey{a.doc_id, a.token_idx}, a.mean_rt_ms);
  }
  std::vector<CorpusToken> out;
  out.reserve(text.size());
  for (const auto& [key, token] : text) {
    CorpusToken t{key.first, key.second, token, std::nullopt};
    if (auto it = rt.find(key); it != rt.end()) t.rt_ms = it->second;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> Standardizer::Apply(std::span<const double> column) const {
  std::vector<double> out(column.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Apply(column[i]);
  return out;
}

Standardizer FitStandardizer(std::span<const double> column) {
  if (column.size() < 2) {
    throw DegenerateError("cannot standardize fewer than 2 values");
  }
  Standardizer s;
  s.mean = Mean(column);
  s.sd = std::sqrt(SampleVariance(column));
  const bool constant = std::all_of(column.begin(), column.end(),
                                    [&](double v) { return v == column[0]; });
  if (constant || !(s.sd > 0.0)) {
    throw DegenerateError("cannot standardize a constant column");
  }
  return s;
}

std::vector<double> Standardize(std::span<const double> column) {
  return FitStandardizer(column).Apply(column);
}

std::vector<std::size_t> FoldAssignment::TestRows(std::size_t f) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] == f) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::TrainRows(std::size_t f) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] != f) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::FoldSizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t f : fold) ++sizes[f];
  return sizes;
}

FoldAssignment KFold(std::size_t n_rows, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  if (n_rows < k) {
    throw ConfigError("k-fold with k = " + std::to_string(k) + " needs at least " +
                      std::to_string(k) + " rows, got " +
                      std::to_string(n_rows));
  }
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n_rows; i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformIndex(i)]);
  }
  FoldAssignment out{std::vector<std::size_t>(n_rows), k, seed};
  for (std::size_t pos = 0; pos < n_rows; ++pos) out.fold[order[pos]] = pos % k;
  return out;
}

FoldAssignment GroupKFold(std::span<const std::string> groups, std::size_t k,
                          std::uint64_t seed) {
  std::map<std::string, std::size_t> ids;
  for (const auto& g : groups) ids.emplace(g, 0);
  std::size_t next = 0;
  for (auto& [name, id] : ids) id = next++;
  const FoldAssignment by_group = KFold(ids.size(), k, seed);
  FoldAssignment out{std::vector<std::size_t>(groups.size()), k, seed};
  for (std::size_t i = 0; i < groups.size(); ++i) {
    out.fold[i] = by_group.fold[ids.at(groups[i])];
  }
  return out;
}

}  // namespace ctxread
