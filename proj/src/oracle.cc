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

#include "ctxread/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctxread/error.h"
#include "ctxread/hilbert.h"
#include "ctxread/io.h"
#include "ctxread/random.h"
#include "json.hpp"

namespace ctxread {

bool OracleReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const OracleCheck& c) { return c.passed; });
}

std::string OracleReport::Json() const {
  nlohmann::ordered_json j;
  j["tail_mass"] = tail_mass;
  j["rows"] = rows;
  j["alpha"] = alpha;
  j["expected_length"] = expected_length;
  j["normalizer"] = normalizer;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["residual"] = c.residual;
    jc["detail"] = c.detail;
    j["checks"].push_back(jc);
  }
  return j.dump(2) + "\n";
}

OracleReport RunOracle(const AutoregressiveLM& lm,
                       const EnumerationBudget& budget, std::size_t kl_trials,
                       std::uint64_t seed) {
  budget.Validate();
  OracleReport rep;
  rep.expected_length = ExpectedLength(lm);
  rep.normalizer = PrefixNormalizer(lm);
  const TruncatedSums sums = EnumerateTruncated(lm, budget);
  rep.tail_mass = sums.context_tail;
  if (sums.context_tail > budget.tail_tol || sums.string_tail > budget.tail_tol) {
    throw ConvergenceError(
        "enumeration to length " + std::to_string(budget.max_len) +
            " leaves context mass " + FormatDouble(sums.context_tail) +
            " and string mass " + FormatDouble(sums.string_tail),
        std::max(sums.context_tail, sums.string_tail));
  }
  const UnigramLM q = UnigramMinimizer(lm);

  {
    const double r = std::max(std::abs(q.normalizer() - rep.normalizer),
                              std::abs(sums.context_mass + sums.context_tail - 1.0));
    rep.checks.push_back({"normalizer_identity", r <= 1e-9, r,
                          "Z_pi = " + FormatDouble(rep.normalizer) +
                              ", Z_q = " + FormatDouble(q.normalizer())});
  }
  {
    const double m = sums.context_mass;
    rep.checks.push_back({"prefix_mass", m >= 1.0 - 1e-6 && m <= 1.0 + 1e-12,
                          1.0 - m,
                          "enumerated context mass " + FormatDouble(m)});
  }
  {
    const double tail = static_cast<double>(budget.max_len) * sums.string_tail +
                        rep.normalizer * sums.context_tail;
    const double r =
        std::abs(rep.expected_length - sums.partial_expected_length - tail);
    rep.checks.push_back(
        {"expected_length", r <= 1e-9 * std::max(1.0, rep.expected_length), r,
         "solve " + FormatDouble(rep.expected_length) + ", enumeration " +
             FormatDouble(sums.partial_expected_length) + " + tail " +
             FormatDouble(tail)});
  }
  {
    const double best = ForwardKlUnigram(lm, q, budget);
    Rng rng = Rng::Substream(seed, "oracle.kl");
    const auto base = q.Probs();
    std::size_t violations = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < kl_trials; ++t) {
      const double scale = 0.5 * rng.Uniform();
      std::vector<double> probs(base.size());
      double total = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = base[i] * std::exp(scale * rng.Normal());
        total += probs[i];
      }
      for (double& p : probs) p /= total;
      const UnigramLM other(lm.alphabet(), std::move(probs));
      const double gap = ForwardKlUnigram(lm, other, budget) - best;
      min_gap = std::min(min_gap, gap);
      if (gap < 0.0) ++violations;
    }
    rep.checks.push_back(
        {"minimizer_optimality", violations == 0,
         kl_trials ? min_gap : 0.0,
         std::to_string(violations) + " of " + std::to_string(kl_trials) +
             " perturbations beat the minimizer; KL = " + FormatDouble(best)});
  }
  {
    const auto measure = MeasureTable::FromLM(lm, budget);
    rep.rows = measure->size();
    const auto vars = MakePredictorVariables(measure, lm, q);
    const auto coef = ProjectionOnto(vars.surprisal, vars.frequency, true);
    rep.alpha = coef.alpha;
    const auto proj = ProjectComplement(vars.surprisal, vars.frequency, true);
    const double r = std::abs(InnerProduct(proj, vars.frequency));
    rep.checks.push_back({"projection_orthogonality", r < 1e-10, r,
                          "alpha = " + FormatDouble(coef.alpha)});
  }
  return rep;
}

}  // namespace ctxread
