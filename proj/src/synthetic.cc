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

#include "ctxread/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ctxread/error.h"
#include "ctxread/io.h"
#include "ctxread/random.h"
#include "json.hpp"

namespace ctxread {
namespace {

std::string PaddedId(const char* prefix, std::size_t i, std::size_t n) {
  int width = 1;
  for (std::size_t m = n; m >= 10; m /= 10) ++width;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

// Draws a unit from the state's distribution with EOS removed.
Symbol SampleUnit(const AutoregressiveLM& lm, std::size_t state, Rng& rng) {
  const std::size_t units = lm.alphabet().size();
  const auto probs = lm.Probs(state);
  double total = 0.0;
  for (std::size_t u = 0; u < units; ++u) total += probs[u];
  if (!(total > 0.0)) {
    throw DegenerateError("state '" + lm.StateKey(state) +
                          "' cannot emit any unit");
  }
  const double r = rng.Uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t u = 0; u < units; ++u) {
    if (probs[u] <= 0.0) continue;
    acc += probs[u];
    last = u;
    if (r < acc) return Symbol(u);
  }
  return Symbol(last);
}

double Term(const std::map<std::string, double>& coeffs, const char* name) {
  auto it = coeffs.find(name);
  return it == coeffs.end() ? 0.0 : it->second;
}

double LinearPredictor(const std::map<std::string, double>& c,
                       const PredictorRecord& r) {
  double v = Term(c, "intercept") + Term(c, "surprisal") * r.current.surprisal +
             Term(c, "frequency") * r.current.frequency +
             Term(c, "pmi") * r.current.pmi +
             Term(c, "length") * r.current.length;
  if (r.prev) {
    v += Term(c, "prev_surprisal") * r.prev->surprisal +
         Term(c, "prev_frequency") * r.prev->frequency +
         Term(c, "prev_pmi") * r.prev->pmi +
         Term(c, "prev_length") * r.prev->length;
  }
  return v;
}

}  // namespace

const std::vector<std::string>& SyntheticCoefficientNames() {
  static const std::vector<std::string> names = {
      "intercept",      "surprisal",      "frequency", "pmi",
      "length",         "prev_surprisal", "prev_frequency",
      "prev_pmi",       "prev_length"};
  return names;
}

SyntheticCorpus GenerateSynthetic(const AutoregressiveLM& lm,
                                  const SyntheticOptions& options) {
  const auto& names = SyntheticCoefficientNames();
  for (const auto& [name, value] : options.true_coeffs) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw ConfigError("unknown coefficient '" + name + "'");
    }
    if (!std::isfinite(value)) {
      throw ConfigError("coefficient '" + name + "' is not finite");
    }
  }
  if (!(options.noise_sd > 0.0) || !std::isfinite(options.noise_sd)) {
    throw ConfigError("noise_sd must be positive");
  }
  if (options.n_docs < 1 || options.doc_len < 1 || options.participants < 1) {
    throw ConfigError("n_docs, doc_len and participants must be positive");
  }
  if (!(options.skip_prob >= 0.0 && options.skip_prob < 1.0)) {
    throw ConfigError("skip_prob must lie in [0, 1)");
  }

  Rng text_rng = Rng::Substream(options.seed, "corpus.text");
  std::vector<CorpusToken> tokens;
  tokens.reserve(options.n_docs * options.doc_len);
  for (std::size_t d = 0; d < options.n_docs; ++d) {
    const std::string doc = PaddedId("d", d + 1, options.n_docs);
    std::size_t state = lm.start_state();
    for (std::size_t i = 0; i < options.doc_len; ++i) {
      const Symbol unit = SampleUnit(lm, state, text_rng);
      tokens.push_back({doc, static_cast<long long>(i + 1),
                        lm.alphabet().Name(unit), std::nullopt});
      state = lm.Successor(state, unit);
    }
  }

  SyntheticCorpus out;
  out.table = BuildPredictorTable(lm, UnigramMinimizer(lm), tokens);

  Rng noise_rng = Rng::Substream(options.seed, "corpus.noise");
  Rng skip_rng = Rng::Substream(options.seed, "corpus.skips");
  out.observations.reserve(tokens.size() * options.participants);
  for (std::size_t p = 0; p < options.participants; ++p) {
    const std::string participant =
        PaddedId("p", p + 1, options.participants);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto& t = tokens[i];
      TokenObservation obs{participant, t.doc_id,
                           std::to_string((t.token_idx - 1) / 10 + 1),
                           t.token_idx, t.token, std::nullopt, false};
      const double rt = LinearPredictor(options.true_coeffs, out.table[i]) +
                        options.noise_sd * noise_rng.Normal();
      if (options.skip_prob > 0.0 && skip_rng.Uniform() < options.skip_prob) {
        obs.skipped = true;
      } else {
        if (rt < 0.0) {
          throw ConfigError(
              "generated a negative reading time; raise the intercept");
        }
        obs.rt_ms = rt;
      }
      out.observations.push_back(std::move(obs));
    }
  }
  // Attach the aggregated RTs the analysis would see.
  const auto joined = CorpusTokens(out.observations);
  for (std::size_t i = 0; i < joined.size(); ++i) {
    out.table[i].rt_ms = joined[i].rt_ms;
  }

  nlohmann::ordered_json sidecar;
  sidecar["true_coeffs"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : options.true_coeffs) {
    sidecar["true_coeffs"][name] = value;
  }
  sidecar["noise_sd"] = options.noise_sd;
  sidecar["seed"] = options.seed;
  sidecar["n_docs"] = options.n_docs;
  sidecar["doc_len"] = options.doc_len;
  sidecar["participants"] = options.participants;
  sidecar["skip_prob"] = options.skip_prob;
  out.sidecar = sidecar.dump(2) + "\n";
  return out;
}

}  // namespace ctxread
