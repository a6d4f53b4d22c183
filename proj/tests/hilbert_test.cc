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

#include "ctxread/hilbert.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ctxread/error.h"
#include "ctxread/lm_io.h"
#include "ctxread/numeric.h"
#include "ctxread/random.h"
#include "oracles.h"

namespace ctxread {
namespace {

const EnumerationBudget kBudget{256, 1e-9};

struct Space {
  std::shared_ptr<const MeasureTable> measure;
  PredictorVariables vars;
};

Space MakeSpace(const AutoregressiveLM& lm) {
  auto measure = MeasureTable::FromLM(lm, kBudget);
  return {measure, MakePredictorVariables(measure, lm, UnigramMinimizer(lm))};
}

TEST(InnerProduct, M0FrequencySquared) {
  const auto s = MakeSpace(oracle::M0());
  const double want = 0.3 * std::pow(std::log(0.3), 2) +
                      0.2 * std::pow(std::log(0.2), 2) +
                      0.5 * std::pow(std::log(0.5), 2);
  EXPECT_NEAR(InnerProduct(s.vars.frequency, s.vars.frequency), want, 1e-9);
  EXPECT_NEAR(want, 1.1932, 1e-4);
}

TEST(InnerProduct, ZeroAndConstant) {
  const auto s = MakeSpace(oracle::M1());
  const auto zero = s.vars.surprisal.Scaled(0.0);
  EXPECT_EQ(InnerProduct(s.vars.surprisal, zero), 0.0);
  const auto one = RandomVariableTable::FromFunction(
      s.measure, "one", [](const MeasureRow&) { return 1.0; });
  EXPECT_NEAR(InnerProduct(one, one), 1.0, 1e-9);
}

// Literal contexts of M1 are a^n; weight(a^n, next) = P(a^n) p(next | a^n) / Z.
TEST(InnerProduct, M1MatchesLiteralContextSum) {
  const auto s = MakeSpace(oracle::M1());
  const double z = 31.0 / 15.0;
  const double fa = std::log(31.0 / 16.0), fe = std::log(31.0 / 15.0);
  double want = 0.0;
  for (int n = 0; n <= 200; ++n) {
    const double p_ctx = n == 0 ? 1.0 : 0.8 * std::pow(0.25, n - 1);
    const double pa = n == 0 ? 0.8 : 0.25, pe = 1.0 - pa;
    want += p_ctx / z * (pa * -std::log(pa) * fa + pe * -std::log(pe) * fe);
  }
  EXPECT_NEAR(InnerProduct(s.vars.surprisal, s.vars.frequency), want, 1e-9);
}

TEST(InnerProduct, Mismatch) {
  const auto a = MakeSpace(oracle::M1());
  const auto b = MakeSpace(oracle::M1());
  EXPECT_THROW(InnerProduct(a.vars.surprisal, b.vars.surprisal), AlignmentError);
}

TEST(InnerProduct, BilinearAndSymmetric) {
  SyntheticLmOptions opt;
  opt.vocabulary = 5;
  opt.eos_prob = 0.3;
  const auto s = MakeSpace(MakeSyntheticBigramLM(opt));
  const auto& x = s.vars.surprisal;
  const auto& y = s.vars.length;
  const auto& z = s.vars.frequency;
  const double a = 1.7, b = -0.4;
  const double lhs = InnerProduct(x.Combine(a, y, b), z);
  const double rhs = a * InnerProduct(x, z) + b * InnerProduct(y, z);
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  EXPECT_DOUBLE_EQ(InnerProduct(x, z), InnerProduct(z, x));
}

TEST(ProjectComplement, SelfProjectionVanishes) {
  const auto s = MakeSpace(oracle::M1());
  for (bool center : {false, true}) {
    const auto r = ProjectComplement(s.vars.frequency, s.vars.frequency, center);
    for (double v : r.values()) EXPECT_NEAR(v, 0.0, 1e-12);
  }
}

TEST(ProjectComplement, MemorylessSurprisalIsFrequency) {
  const auto s = MakeSpace(oracle::M0());
  const auto r = ProjectComplement(s.vars.surprisal, s.vars.frequency, false);
  for (double v : r.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(ProjectComplement, OrthogonalAndIdempotent) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SyntheticLmOptions opt;
    opt.vocabulary = 6;
    opt.eos_prob = 0.25;
    opt.seed = seed;
    const auto s = MakeSpace(MakeSyntheticBigramLM(opt));
    for (bool center : {false, true}) {
      const auto r =
          ProjectComplement(s.vars.surprisal, s.vars.frequency, center);
      if (center) {
        const auto rc = r.Combine(1.0, RandomVariableTable::FromFunction(
                                           s.measure, "one",
                                           [](const MeasureRow&) { return 1.0; }),
                                  -Expectation(r));
        const auto fc = s.vars.frequency.Combine(
            1.0,
            RandomVariableTable::FromFunction(
                s.measure, "one", [](const MeasureRow&) { return 1.0; }),
            -Expectation(s.vars.frequency));
        EXPECT_NEAR(InnerProduct(rc, fc), 0.0, 1e-10);
      } else {
        EXPECT_NEAR(InnerProduct(r, s.vars.frequency), 0.0, 1e-10);
        const auto again = ProjectComplement(r, s.vars.frequency, false);
        for (std::size_t i = 0; i < r.values().size(); ++i) {
          EXPECT_NEAR(again.values()[i], r.values()[i], 1e-12);
        }
      }
    }
  }
}

TEST(ProjectComplement, ZeroTargetThrows) {
  const auto s = MakeSpace(oracle::M1());
  EXPECT_THROW(
      ProjectComplement(s.vars.surprisal, s.vars.surprisal.Scaled(0.0), false),
      DegenerateError);
}

TEST(SampleOrthogonalize, Examples) {
  const std::vector<double> x = {1, 2, 3};
  for (double v : SampleOrthogonalize(x, x)) EXPECT_NEAR(v, 0.0, 1e-15);
  const std::vector<double> z = {0, 1, 3};
  const auto r = SampleOrthogonalize(x, z);
  EXPECT_NEAR(r[0], -1.0 / 7, 1e-15);
  EXPECT_NEAR(r[1], 3.0 / 14, 1e-15);
  EXPECT_NEAR(r[2], -1.0 / 14, 1e-15);
  EXPECT_NEAR(PairwiseDot(r, Centered(z)), 0.0, 1e-15);
}

TEST(SampleOrthogonalize, AlreadyOrthogonal) {
  const std::vector<double> x = {1, -1, 1, -1};
  const std::vector<double> z = {1, 1, -1, -1};
  const auto r = SampleOrthogonalize(x, z);
  const auto xc = Centered(x);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], xc[i], 1e-12);
}

TEST(SampleOrthogonalize, Errors) {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> c = {4, 4, 4};
  const std::vector<double> shorter = {1, 2};
  EXPECT_THROW(SampleOrthogonalize(x, c), DegenerateError);
  EXPECT_THROW(SampleOrthogonalize(x, shorter), AlignmentError);
}

TEST(FitProjection, Examples) {
  // Var(z) = 1 and Cov(x, z) = 0.5.
  const std::vector<double> z = {-1, 0, 1};
  const std::vector<double> x = {-0.5, 7, 0.5};
  EXPECT_NEAR(SampleVariance(z), 1.0, 1e-15);
  EXPECT_NEAR(SampleCovariance(x, z), 0.5, 1e-15);
  EXPECT_NEAR(FitProjection(x, z).alpha, 0.5, 1e-15);

  const std::vector<double> z2 = {0.3, -1.2, 4.0, 2.2, 0.0};
  std::vector<double> x2;
  for (double v : z2) x2.push_back(2.0 * v + 5.0);
  const auto coef = FitProjection(x2, z2);
  EXPECT_NEAR(coef.alpha, 2.0, 1e-14);
  for (double v : ApplyProjection(coef, x2, z2)) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(FitProjection, MatchesLeastSquaresSlope) {
  Rng rng(5);
  std::vector<double> x(200), z(200);
  for (std::size_t i = 0; i < 200; ++i) {
    z[i] = rng.Normal();
    x[i] = 0.7 * z[i] + rng.Normal() + 3.0;
  }
  Eigen::MatrixXd design(200, 2);
  Eigen::VectorXd y(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = z[static_cast<std::size_t>(i)];
    y(i) = x[static_cast<std::size_t>(i)];
  }
  const auto beta = oracle::PinvSolve(design, y);
  EXPECT_NEAR(FitProjection(x, z).alpha, beta(1), 1e-10);
}

TEST(SampleOrthogonalize, DecorrelatesRandomTables) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + rng.UniformIndex(200);
    std::vector<double> x(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = rng.Normal() * 3.0 + 1.0;
      x[i] = rng.Uniform() * z[i] + rng.Normal();
    }
    EXPECT_LT(std::abs(Correlation(SampleOrthogonalize(x, z), z)), 1e-10);
  }
}

TEST(MeasureTable, RejectsBadWeights) {
  std::vector<MeasureRow> rows = {{"", 0, 0, Symbol(0), 0.5},
                                  {"", 0, 0, Symbol(1), 0.6}};
  EXPECT_THROW(MeasureTable(rows, 0.0), ConfigError);
  rows[1].weight = -0.5;
  EXPECT_THROW(MeasureTable(rows, 0.0), ConfigError);
}

}  // namespace
}  // namespace ctxread
