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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ctxread/error.h"
#include "ctxread/hilbert.h"
#include "ctxread/lm_io.h"
#include "ctxread/random.h"
#include "ctxread/synthetic.h"

namespace ctxread {
namespace {

PredictorTriple Triple(std::string name, std::vector<double> s,
                       std::vector<double> f) {
  std::vector<double> p(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) p[i] = f[i] - s[i];
  return {std::move(name), std::move(s), std::move(f), std::move(p)};
}

TEST(EquivalenceCheck, HandBuiltTenRows) {
  const std::vector<double> s = {2.1, 3.4, 0.7, 5.5, 1.9, 4.2, 2.8, 6.0, 3.3, 1.1};
  const std::vector<double> f = {1.0, 2.2, 0.9, 3.1, 1.5, 2.0, 2.5, 4.4, 1.7, 0.8};
  const std::vector<double> y = {210, 240, 190, 280, 205, 250, 230, 300, 235, 195};
  const std::vector<PredictorTriple> triples = {Triple("", s, f)};
  const auto r = EquivalenceCheck(triples, {}, y);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.r2_delta, 1e-12);
  ASSERT_EQ(r.triples.size(), 1u);
  EXPECT_NEAR(r.triples[0].beta_pmi, -r.triples[0].beta_surprisal, 1e-8);
  EXPECT_NEAR(r.triples[0].beta_frequency_pmi_model,
              r.triples[0].beta_frequency_surprisal_model +
                  r.triples[0].beta_surprisal,
              1e-8);
}

TEST(EquivalenceCheck, SyntheticTablePasses) {
  SyntheticLmOptions lm_opt;
  const auto lm = MakeSyntheticBigramLM(lm_opt);
  SyntheticOptions opt;
  opt.true_coeffs = {{"intercept", 200}, {"frequency", 30}, {"length", 5}};
  opt.n_docs = 20;
  opt.seed = 3;
  const auto corpus = GenerateSynthetic(lm, opt);
  std::vector<double> s, f, len, y;
  for (const auto& r : corpus.table) {
    if (!r.rt_ms) continue;
    s.push_back(r.current.surprisal);
    f.push_back(r.current.frequency);
    len.push_back(r.current.length);
    y.push_back(*r.rt_ms);
  }
  const std::vector<PredictorTriple> triples = {Triple("", s, f)};
  const auto r = EquivalenceCheck(triples, {{"length", len, ""}}, y);
  EXPECT_TRUE(r.passed);
  // With no surprisal effect, frequency coefficients agree up to noise.
  EXPECT_NEAR(r.triples[0].beta_frequency_pmi_model,
              r.triples[0].beta_frequency_surprisal_model, 0.5);
}

TEST(EquivalenceCheck, BrokenPmiThrows) {
  auto t = Triple("", {1, 2, 3, 4, 5}, {2, 1, 4, 3, 6});
  t.pmi[2] += 1e-3;
  const std::vector<PredictorTriple> triples = {t};
  const std::vector<double> y = {1, 2, 2, 3, 5};
  EXPECT_THROW(EquivalenceCheck(triples, {}, y), IdentityError);
}

TEST(ResidualizationTriplet, RandomTrials) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x1(500), x2(500), y(500);
    for (std::size_t i = 0; i < 500; ++i) {
      x2[i] = rng.Normal();
      x1[i] = 0.6 * x2[i] + rng.Normal();
      y[i] = 1.0 + 2.0 * x1[i] - x2[i] + rng.Normal();
    }
    const auto r = ResidualizationTriplet(x1, x2, y);
    EXPECT_TRUE(r.passed);
    EXPECT_NEAR(r.beta_a1, r.beta_b1, 1e-8);
    EXPECT_NEAR(r.beta_b2, r.beta_c2, 1e-8);
  }
}

TEST(ResidualizationTriplet, OrthogonalInputsShareBeta2) {
  const std::vector<double> x1 = {1, -1, 1, -1, 1, -1};
  const std::vector<double> x2 = {1, 1, -1, -1, 0, 0};
  const std::vector<double> y = {2.0, 0.5, -0.3, -1.2, 0.9, 0.1};
  const auto r = ResidualizationTriplet(x1, x2, y);
  EXPECT_NEAR(r.beta_a2, r.beta_b2, 1e-8);
  EXPECT_NEAR(r.beta_b2, r.beta_c2, 1e-8);
}

TEST(ResidualizationTriplet, IdenticalInputsAreDegenerate) {
  const std::vector<double> x = {1, 2, 3, 5, 8};
  const std::vector<double> y = {1, 0, 2, 1, 3};
  EXPECT_THROW(ResidualizationTriplet(x, x, y), DegenerateError);
}

TEST(ResidualizationTriplet, UsesSampleOrthogonalize) {
  const std::vector<double> x1 = {1, 2, 3, 4, 6};
  const std::vector<double> x2 = {0, 1, 3, 2, 5};
  const auto r1 = SampleOrthogonalize(x1, x2);
  double dot = 0.0;
  for (std::size_t i = 0; i < 5; ++i) dot += r1[i] * (x2[i] - 2.2);
  EXPECT_NEAR(dot, 0.0, 1e-12);
}

}  // namespace
}  // namespace ctxread
