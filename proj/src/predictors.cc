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

#include "ctxread/predictors.h"

#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "ctxread/error.h"
#include "ctxread/io.h"

namespace ctxread {
namespace {

double NegLog(double p, const std::string& what) {
  if (!(p > 0.0)) {
    throw DegenerateError(what + " has probability zero");
  }
  const double v = -std::log(p);
  return v > 0.0 ? v : 0.0;  // -log(1) may round to -0
}

// Copies each record's values into the next record of the same document.
void FillSpillover(std::vector<PredictorRecord>& table) {
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].doc_id == table[i - 1].doc_id) {
      table[i].prev = table[i - 1].current;
    }
  }
}

std::string TokenLabel(const CorpusToken& t) {
  return t.doc_id + ":" + std::to_string(t.token_idx) + " '" + t.token + "'";
}

}  // namespace

double Surprisal(const AutoregressiveLM& lm, std::span<const Symbol> context,
                 Symbol unit) {
  return NegLog(Conditional(lm, context, unit),
                "unit '" + lm.alphabet().Name(unit) + "' in its context");
}

double Surprisal(const AutoregressiveLM& lm,
                 std::span<const std::string> context, std::string_view unit) {
  const auto ctx = lm.alphabet().Encode(context);
  return Surprisal(lm, ctx, lm.alphabet().Lookup(unit));
}

double Frequency(const UnigramLM& q, Symbol unit) {
  return NegLog(q.Prob(unit),
                "unit '" + q.alphabet().Name(unit) + "' under the unigram model");
}

double Frequency(const UnigramLM& q, std::string_view unit) {
  return Frequency(q, q.alphabet().Lookup(unit));
}

double Pmi(double surprisal, double frequency) {
  if (!std::isfinite(surprisal) || !std::isfinite(frequency)) {
    throw DegenerateError("PMI of non-finite inputs");
  }
  return frequency - surprisal;
}

ExternalPredictorFile ParseExternalPredictors(std::string_view tsv) {
  const auto lines = SplitLines(tsv);
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  if (first == lines.size()) throw FormatError("predictor file is empty");
  const auto header = SplitTabs(lines[first]);
  const std::vector<std::string_view> expected = {
      "doc_id", "token_idx", "token", "surprisal", "frequency"};
  if (header != expected) {
    throw FormatError(
        "predictor file header must be doc_id, token_idx, token, surprisal, "
        "frequency");
  }
  ExternalPredictorFile out;
  std::map<std::string, long long> last_idx;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    const auto f = SplitTabs(lines[i]);
    if (f.size() != 5) throw FormatError(where + ": expected 5 fields");
    ExternalPredictorRow row;
    row.doc_id = f[0];
    row.token = f[2];
    if (!ParseInt(f[1], &row.token_idx)) {
      throw FormatError(where + ": token_idx is not an integer");
    }
    if (!ParseDouble(f[3], &row.surprisal) || row.surprisal < 0.0) {
      throw FormatError(where + ": surprisal must be finite and >= 0");
    }
    if (!ParseDouble(f[4], &row.frequency) || row.frequency < 0.0) {
      throw FormatError(where + ": frequency must be finite and >= 0");
    }
    auto [it, fresh] = last_idx.emplace(row.doc_id, row.token_idx);
    if (!fresh) {
      if (row.token_idx <= it->second) {
        throw FormatError(where + ": token_idx " +
                          std::to_string(row.token_idx) + " of document '" +
                          row.doc_id + "' does not increase");
      }
      it->second = row.token_idx;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

ExternalPredictorFile ReadExternalPredictors(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return ParseExternalPredictors(text);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::vector<PredictorRecord> BuildPredictorTable(
    const AutoregressiveLM& lm, const UnigramLM& unigram,
    std::span<const CorpusToken> tokens) {
  const auto& alphabet = lm.alphabet();
  std::set<std::string> missing;
  for (const auto& t : tokens) {
    if (!alphabet.Contains(t.token) || alphabet.eos_name() == t.token) {
      missing.insert(t.token);
    }
  }
  if (!missing.empty()) {
    std::vector<std::string> list(missing.begin(), missing.end());
    std::string msg = "tokens outside the LM alphabet:";
    for (const auto& m : list) msg += " '" + m + "'";
    throw CoverageError(msg, std::move(list));
  }

  std::vector<PredictorRecord> table;
  table.reserve(tokens.size());
  std::size_t state = lm.start_state();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (i == 0 || t.doc_id != tokens[i - 1].doc_id) state = lm.start_state();
    const Symbol unit = alphabet.LookupUnit(t.token);
    PredictorRecord rec{t.doc_id, t.token_idx, t.token, {}, std::nullopt,
                        t.rt_ms};
    rec.current.surprisal =
        NegLog(lm.Prob(state, unit), "token " + TokenLabel(t));
    rec.current.frequency = Frequency(unigram, unit);
    rec.current.pmi = Pmi(rec.current.surprisal, rec.current.frequency);
    rec.current.length = static_cast<double>(Utf8Length(t.token));
    table.push_back(std::move(rec));
    state = lm.Successor(state, unit);
  }
  FillSpillover(table);
  return table;
}

std::vector<PredictorRecord> BuildPredictorTable(
    const ExternalPredictorFile& file, std::span<const CorpusToken> tokens) {
  std::map<std::pair<std::string, long long>, const ExternalPredictorRow*> by_key;
  for (const auto& row : file.rows) {
    if (!by_key.emplace(std::pair{row.doc_id, row.token_idx}, &row).second) {
      throw FormatError("predictor file has two rows for " + row.doc_id + ":" +
                        std::to_string(row.token_idx));
    }
  }
  std::vector<std::string> missing;
  std::vector<PredictorRecord> table;
  table.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = by_key.find({t.doc_id, t.token_idx});
    if (it == by_key.end() || it->second->token != t.token) {
      missing.push_back(TokenLabel(t));
      continue;
    }
    PredictorRecord rec{t.doc_id, t.token_idx, t.token, {}, std::nullopt,
                        t.rt_ms};
    rec.current.surprisal = it->second->surprisal;
    rec.current.frequency = it->second->frequency;
    rec.current.pmi = Pmi(rec.current.surprisal, rec.current.frequency);
    rec.current.length = static_cast<double>(Utf8Length(t.token));
    table.push_back(std::move(rec));
  }
  if (!missing.empty()) {
    std::string msg = "corpus tokens without predictor rows:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) {
      msg += " " + missing[i];
    }
    if (missing.size() > 20) {
      msg += " (and " + std::to_string(missing.size() - 20) + " more)";
    }
    throw CoverageError(msg, std::move(missing));
  }
  FillSpillover(table);
  return table;
}

std::string FormatPredictorTable(std::span<const PredictorRecord> table) {
  std::string out =
      "doc_id\ttoken_idx\ttoken\tsurprisal\tfrequency\tpmi\tlength\t"
      "prev_surprisal\tprev_frequency\tprev_pmi\tprev_length\trt_ms\n";
  auto num = [](double v) { return FormatDouble(v); };
  for (const auto& r : table) {
    out += r.doc_id + '\t' + std::to_string(r.token_idx) + '\t' + r.token;
    for (double v : {r.current.surprisal, r.current.frequency, r.current.pmi,
                     r.current.length}) {
      out += '\t' + num(v);
    }
    if (r.prev) {
      for (double v :
           {r.prev->surprisal, r.prev->frequency, r.prev->pmi, r.prev->length}) {
        out += '\t' + num(v);
      }
    } else {
      out += "\tNA\tNA\tNA\tNA";
    }
    out += '\t' + (r.rt_ms ? num(*r.rt_ms) : std::string("NA")) + '\n';
  }
  return out;
}

}  // namespace ctxread
