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

#include "ctxread/identities.h"

#include <algorithm>
#include <cmath>

#include "ctxread/error.h"
#include "ctxread/hilbert.h"
#include "ctxread/io.h"
#include "ctxread/numeric.h"

namespace ctxread {

EquivalenceReport EquivalenceCheck(std::span<const PredictorTriple> triples,
                                   const std::vector<Column>& covariates,
                                   std::span<const double> y,
                                   const EquivalenceTolerance& tol) {
  if (triples.empty()) throw ConfigError("equivalence check needs a triple");
  std::vector<Column> surp_cols, pmi_cols;
  for (const auto& t : triples) {
    for (std::size_t i = 0; i < t.pmi.size(); ++i) {
      if (std::abs(t.pmi[i] - (t.frequency[i] - t.surprisal[i])) > 1e-9) {
        throw IdentityError("row " + std::to_string(i) + ": " + t.name +
                            "pmi differs from " + t.name + "frequency - " +
                            t.name + "surprisal");
      }
    }
    surp_cols.push_back({t.name + "surprisal", t.surprisal, ""});
    surp_cols.push_back({t.name + "frequency", t.frequency, ""});
    pmi_cols.push_back({t.name + "pmi", t.pmi, ""});
    pmi_cols.push_back({t.name + "frequency", t.frequency, ""});
  }
  surp_cols.insert(surp_cols.end(), covariates.begin(), covariates.end());
  pmi_cols.insert(pmi_cols.end(), covariates.begin(), covariates.end());
  const DesignMatrix xs(surp_cols), xp(pmi_cols);
  const FitResult fs = OlsFit(xs, y), fp = OlsFit(xp, y);

  EquivalenceReport rep;
  rep.r2_surprisal = fs.r2;
  rep.r2_pmi = fp.r2;
  rep.r2_delta = std::abs(fs.r2 - fp.r2);
  const auto ps = Predict(fs, xs), pp = Predict(fp, xp);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    rep.max_prediction_delta =
        std::max(rep.max_prediction_delta, std::abs(ps[i] - pp[i]));
  }
  bool ok = rep.r2_delta <= tol.r2;
  const double scale = std::max(1.0, std::sqrt(SampleVariance(y)));
  ok = ok && rep.max_prediction_delta <= tol.prediction * scale;
  for (const auto& t : triples) {
    EquivalenceReport::TripleDeltas d;
    d.name = t.name;
    d.beta_surprisal = fs.Coefficient(t.name + "surprisal");
    d.beta_pmi = fp.Coefficient(t.name + "pmi");
    d.beta_frequency_surprisal_model = fs.Coefficient(t.name + "frequency");
    d.beta_frequency_pmi_model = fp.Coefficient(t.name + "frequency");
    d.pmi_delta = std::abs(d.beta_pmi + d.beta_surprisal);
    d.frequency_shift_delta = std::abs(d.beta_frequency_pmi_model -
                                       d.beta_frequency_surprisal_model -
                                       d.beta_surprisal);
    ok = ok && d.pmi_delta <= tol.coefficient &&
         d.frequency_shift_delta <= tol.coefficient;
    rep.triples.push_back(d);
  }
  rep.passed = ok;
  if (!ok) {
    std::string msg = "surprisal/PMI model equivalence failed: R2 delta " +
                      FormatDouble(rep.r2_delta) + ", prediction delta " +
                      FormatDouble(rep.max_prediction_delta);
    for (const auto& d : rep.triples) {
      msg += ", " + d.name + "pmi delta " + FormatDouble(d.pmi_delta) + ", " +
             d.name + "frequency shift delta " +
             FormatDouble(d.frequency_shift_delta);
    }
    throw IdentityError(msg);
  }
  return rep;
}

ResidualizationReport ResidualizationTriplet(std::span<const double> x1,
                                             std::span<const double> x2,
                                             std::span<const double> y,
                                             double tol) {
  const std::vector<double> r1 = SampleOrthogonalize(x1, x2);
  {
    const auto c1 = Centered(x1);
    if (PairwiseDot(r1, r1) <= 1e-20 * std::max(PairwiseDot(c1, c1), 1e-300)) {
      throw DegenerateError("x1 vanishes after residualization against x2");
    }
  }
  const std::vector<double> a(x1.begin(), x1.end()), b(x2.begin(), x2.end());
  const FitResult fa = OlsFit(DesignMatrix({{"x1", a, ""}, {"x2", b, ""}}), y);
  const FitResult fb = OlsFit(DesignMatrix({{"x1", r1, ""}, {"x2", b, ""}}), y);
  const FitResult fc = OlsFit(DesignMatrix({{"x2", b, ""}}), y);
  ResidualizationReport rep;
  rep.beta_a1 = fa.Coefficient("x1");
  rep.beta_a2 = fa.Coefficient("x2");
  rep.beta_b1 = fb.Coefficient("x1");
  rep.beta_b2 = fb.Coefficient("x2");
  rep.beta_c2 = fc.Coefficient("x2");
  rep.passed = std::abs(rep.beta_a1 - rep.beta_b1) <= tol &&
               std::abs(rep.beta_b2 - rep.beta_c2) <= tol;
  return rep;
}

}  // namespace ctxread
