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

#include "ctxread/lm_io.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ctxread/error.h"
#include "ctxread/io.h"
#include "ctxread/random.h"

namespace ctxread {
namespace {

constexpr std::string_view kStart = "^";
constexpr std::string_view kEos = "$";

struct ParsedState {
  bool anchored = false;
  std::vector<std::string> history;
};

ParsedState ParseStateKey(std::string_view key, std::size_t line) {
  ParsedState out;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= key.size()) {
    std::size_t space = key.find(' ', pos);
    if (space == std::string_view::npos) space = key.size();
    const std::string_view token = key.substr(pos, space - pos);
    if (token.empty()) {
      throw FormatError("line " + std::to_string(line) +
                        ": malformed state '" + std::string(key) + "'");
    }
    if (token == kStart) {
      if (!first) {
        throw FormatError("line " + std::to_string(line) +
                          ": '^' inside state '" + std::string(key) + "'");
      }
      out.anchored = true;
    } else if (token == kEos) {
      throw FormatError("line " + std::to_string(line) +
                        ": EOS inside state '" + std::string(key) + "'");
    } else {
      out.history.emplace_back(token);
    }
    first = false;
    pos = space + 1;
  }
  return out;
}

}  // namespace

AutoregressiveLM ParseLmTsv(std::string_view text) {
  const auto lines = SplitLines(text);
  std::size_t i = 0;
  while (i < lines.size() && lines[i].empty()) ++i;
  if (i == lines.size()) throw FormatError("LM file is empty");
  const auto header = SplitTabs(lines[i]);
  if (header.size() != 3 || header[0] != "state" || header[1] != "unit" ||
      header[2] != "prob") {
    throw FormatError("LM file header must be 'state<TAB>unit<TAB>prob'");
  }

  std::vector<std::string> state_order;
  std::map<std::string, std::map<std::string, double>> rows;
  std::vector<std::string> units;
  std::set<std::string> seen_units;
  std::map<std::string, std::size_t> state_line;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t line_no = i + 1;
    const auto fields = SplitTabs(lines[i]);
    if (fields.size() != 3) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": expected 3 tab-separated fields");
    }
    const std::string state(fields[0]);
    const std::string unit(fields[1]);
    double prob = 0.0;
    if (!ParseDouble(fields[2], &prob)) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": invalid probability '" + std::string(fields[2]) +
                        "'");
    }
    if (unit.empty() || unit == kStart || unit.find(' ') != std::string::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": invalid unit '" +
                        unit + "'");
    }
    if (!rows.count(state)) {
      state_order.push_back(state);
      state_line[state] = line_no;
    }
    if (!rows[state].emplace(unit, prob).second) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": duplicate row for state '" + state + "', unit '" +
                        unit + "'");
    }
    if (unit != kEos && seen_units.insert(unit).second) units.push_back(unit);
  }
  if (rows.empty()) throw FormatError("LM file has no rows");

  UnitAlphabet alphabet(units, std::string(kEos));
  std::vector<ParsedState> parsed;
  std::size_t order = 0;
  for (const auto& key : state_order) {
    parsed.push_back(ParseStateKey(key, state_line[key]));
    if (!parsed.back().anchored) {
      order = std::max(order, parsed.back().history.size());
    }
  }

  std::vector<AutoregressiveLM::State> states;
  for (std::size_t s = 0; s < state_order.size(); ++s) {
    const ParsedState& ps = parsed[s];
    const std::string& key = state_order[s];
    if (ps.anchored ? (!ps.history.empty() && ps.history.size() >= order)
                    : ps.history.size() != order) {
      throw FormatError("state '" + key + "' does not fit model order " +
                        std::to_string(order));
    }
    AutoregressiveLM::State st;
    for (const auto& h : ps.history) {
      if (!alphabet.Contains(h)) {
        throw FormatError("state '" + key + "' mentions unknown unit '" + h +
                          "'");
      }
      st.history.push_back(alphabet.LookupUnit(h));
    }
    st.probs.assign(alphabet.symbol_count(), 0.0);
    for (const auto& [unit, prob] : rows[key]) {
      st.probs[Index(alphabet.Lookup(unit))] = prob;
    }
    states.push_back(std::move(st));
  }
  return AutoregressiveLM(std::move(alphabet), order, std::move(states));
}

AutoregressiveLM ReadLmTsv(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return ParseLmTsv(text);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string FormatLmTsv(const AutoregressiveLM& lm) {
  std::string out = "state\tunit\tprob\n";
  const auto& alphabet = lm.alphabet();
  for (std::size_t s = 0; s < lm.state_count(); ++s) {
    const std::string key = lm.StateKey(s);
    for (std::size_t sym = 0; sym < alphabet.symbol_count(); ++sym) {
      out += key;
      out += '\t';
      out += alphabet.Name(Symbol(sym));
      out += '\t';
      out += FormatDouble(lm.Prob(s, Symbol(sym)));
      out += '\n';
    }
  }
  return out;
}

AutoregressiveLM MakeSyntheticBigramLM(const SyntheticLmOptions& options) {
  if (options.vocabulary < 2) throw ConfigError("vocabulary must be >= 2");
  if (!(options.eos_prob > 0.0 && options.eos_prob < 1.0)) {
    throw ConfigError("eos_prob must lie in (0, 1)");
  }
  Rng rng = Rng::Substream(options.seed, "lm");
  static constexpr std::string_view kConsonants = "bdfgklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";

  std::vector<std::string> words;
  std::set<std::string> taken;
  while (words.size() < options.vocabulary) {
    const std::size_t rank = words.size();
    const std::size_t length = 2 + rank / 3 + rng.UniformIndex(3);
    std::string word;
    for (std::size_t k = 0; k < length; ++k) {
      const auto& pool = (k % 2 == 0) ? kConsonants : kVowels;
      word += pool[rng.UniformIndex(pool.size())];
    }
    if (taken.insert(word).second) words.push_back(word);
  }
  UnitAlphabet alphabet(words);

  const std::size_t v = options.vocabulary;
  std::vector<double> profile(v);
  for (std::size_t r = 0; r < v; ++r) {
    profile[r] = -options.zipf_exponent * std::log(static_cast<double>(r + 1));
  }
  auto row = [&]() {
    std::vector<double> logits(v);
    double top = -INFINITY;
    for (std::size_t u = 0; u < v; ++u) {
      logits[u] = options.context_strength * profile[u] +
                  options.context_noise * rng.Normal();
      top = std::max(top, logits[u]);
    }
    double z = 0.0;
    for (double& l : logits) z += (l = std::exp(l - top));
    std::vector<double> probs(v + 1);
    for (std::size_t u = 0; u < v; ++u) {
      probs[u] = (1.0 - options.eos_prob) * logits[u] / z;
    }
    probs[v] = options.eos_prob;
    return probs;
  };

  std::vector<AutoregressiveLM::State> states;
  states.push_back({{}, row()});
  for (std::size_t u = 0; u < v; ++u) states.push_back({{Symbol(u)}, row()});
  return AutoregressiveLM(std::move(alphabet), 1, std::move(states));
}

}  // namespace ctxread
