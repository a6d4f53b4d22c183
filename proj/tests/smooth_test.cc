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

#include "ctxread/smooth.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ctxread/corpus.h"
#include "ctxread/error.h"
#include "ctxread/random.h"
#include "ctxread/regression.h"
#include "oracles.h"

namespace ctxread {
namespace {

std::vector<double> Uniforms(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * rng.Uniform();
  return v;
}

TEST(CrBasis, Shape) {
  Rng rng(1);
  const auto x = Uniforms(rng, 100, 0, 1);
  const auto m = CrBasisMatrix(x, 6);
  EXPECT_EQ(m.rows(), 100);
  EXPECT_EQ(m.cols(), 6);
}

TEST(CrBasis, InterpolatesAtKnotsAndSolvesItsSystem) {
  const CrBasis basis(std::vector<double>{0.0, 0.7, 1.5, 2.0, 3.6});
  const auto at_knots = basis.Evaluate(basis.knots());
  EXPECT_LT((at_knots - Eigen::MatrixXd::Identity(5, 5)).norm(), 1e-12);
  const Eigen::MatrixXd inner = basis.second_derivatives().middleRows(1, 3);
  const Eigen::MatrixXd resid =
      basis.system_lhs() * inner - basis.system_rhs();
  EXPECT_LT(resid.norm(), 1e-10);
  EXPECT_LT(basis.second_derivatives().row(0).norm(), 1e-15);
  EXPECT_LT(basis.second_derivatives().row(4).norm(), 1e-15);
}

// First derivatives match across interior knots: the pieces join smoothly.
TEST(CrBasis, ContinuousFirstDerivative) {
  const CrBasis basis(std::vector<double>{0.0, 1.0, 2.5, 3.0, 5.0});
  const double h = 1e-6;
  for (double knot : {1.0, 2.5, 3.0}) {
    const std::vector<double> pts = {knot - 2 * h, knot - h, knot, knot + h,
                                     knot + 2 * h};
    const auto v = basis.Evaluate(pts);
    const Eigen::VectorXd left = (v.row(2) - v.row(1)) / h;
    const Eigen::VectorXd right = (v.row(3) - v.row(2)) / h;
    EXPECT_LT((left - right).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(CrBasis, SpansLinearFunctions) {
  Rng rng(2);
  const auto x = Uniforms(rng, 100, -3, 4);
  const auto m = CrBasisMatrix(x, 6);
  Eigen::VectorXd y(100);
  for (Eigen::Index i = 0; i < 100; ++i) y(i) = 1.5 - 0.8 * x[i];
  const Eigen::VectorXd fit = m * oracle::PinvSolve(m, y);
  EXPECT_LT((y - fit).norm(), 1e-9);
  // Linear beyond the boundary knots.
  const CrBasis basis(x, 6);
  const std::vector<double> outside = {-10.0, -9.0, -8.0};
  const auto v = basis.Evaluate(outside);
  EXPECT_LT(((v.row(2) - v.row(1)) - (v.row(1) - v.row(0))).norm(), 1e-10);
  // Penalty vanishes on linear knot values.
  Eigen::VectorXd lin(6);
  for (Eigen::Index j = 0; j < 6; ++j) lin(j) = 2.0 + 3.0 * basis.knots()[j];
  EXPECT_LT(std::abs(lin.dot(basis.penalty() * lin)), 1e-8);
}

TEST(CrBasis, TooFewDistinctValues) {
  const std::vector<double> x = {1, 1, 2, 2, 3};
  EXPECT_THROW(CrBasis(x, 6), DegenerateError);
  EXPECT_THROW(CrBasis(x, 2), ConfigError);
}

TEST(Gcv, HandInstance) {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y = {1.0, 2.5, 2.0, 3.5, 3.0};
  const std::vector<SmoothTerm> terms = {{"x", x, 3}};
  const std::vector<double> lambda = {0.5};
  const auto fit = FitSmoothFixed(y, terms, lambda);
  const auto ref = oracle::SmoothByHatMatrix(fit, terms, y);
  double sse = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(fit.fitted[i], ref.fitted(static_cast<Eigen::Index>(i)), 1e-10);
    sse += std::pow(y[i] - ref.fitted(static_cast<Eigen::Index>(i)), 2);
  }
  EXPECT_NEAR(fit.edf, ref.edf, 1e-10);
  EXPECT_NEAR(fit.gcv, 5.0 * sse / std::pow(5.0 - ref.edf, 2), 1e-10);
  EXPECT_DOUBLE_EQ(GcvScore(5, 2.0, 2.0), 10.0 / 9.0);
}

TEST(FitSmoothFixed, MatchesHatMatrixWithTwoTerms) {
  Rng rng(3);
  const auto a = Uniforms(rng, 120, 0, 1), b = Uniforms(rng, 120, -2, 2);
  std::vector<double> y(120);
  for (std::size_t i = 0; i < 120; ++i) {
    y[i] = std::sin(6 * a[i]) + b[i] * b[i] + 0.3 * rng.Normal();
  }
  const std::vector<SmoothTerm> terms = {{"a", a, 6}, {"b", b, 5}};
  const std::vector<double> lambdas = {0.01, 3.0};
  const auto fit = FitSmoothFixed(y, terms, lambdas);
  const auto ref = oracle::SmoothByHatMatrix(fit, terms, y);
  for (std::size_t i = 0; i < 120; ++i) {
    EXPECT_NEAR(fit.fitted[i], ref.fitted(static_cast<Eigen::Index>(i)), 1e-9);
  }
  EXPECT_NEAR(fit.edf, ref.edf, 1e-9);
  EXPECT_NEAR(fit.terms[0].edf + fit.terms[1].edf + 1.0, fit.edf, 1e-9);
}

TEST(FitSmooth, LinearTargetIsFitExactly) {
  Rng rng(4);
  const auto x = Uniforms(rng, 80, 0, 10);
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 + 0.25 * v);
  const std::vector<SmoothTerm> terms = {{"x", x, 6}};
  const auto fit = FitSmooth(y, terms, LambdaGrid());
  for (std::size_t i = 0; i < y.size(); ++i) {
    EXPECT_NEAR(fit.fitted[i], y[i], 1e-6);
  }
  const std::vector<double> big = {1e4};
  const auto stiff = FitSmoothFixed(y, terms, big);
  for (std::size_t i = 0; i < y.size(); ++i) {
    EXPECT_NEAR(stiff.fitted[i], y[i], 1e-6);
  }
}

TEST(FitSmooth, PredictReproducesFitted) {
  Rng rng(5);
  const auto x = Uniforms(rng, 60, -1, 1);
  std::vector<double> y;
  for (double v : x) y.push_back(v * v + 0.1 * rng.Normal());
  const auto fit = FitSmooth(y, {{"x", x, 6}}, LambdaGrid());
  const auto pred = PredictSmooth(fit, {x});
  for (std::size_t i = 0; i < y.size(); ++i) {
    EXPECT_NEAR(pred[i], fit.fitted[i], 1e-10);
  }
}

TEST(FitSmooth, PureNoisePicksLargestLambda) {
  const auto grid = LambdaGrid();
  int largest = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    const auto x = Uniforms(rng, 200, 0, 1);
    std::vector<double> y(200);
    for (double& v : y) v = rng.Normal();
    const auto fit = FitSmooth(y, {{"x", x, 6}}, grid);
    if (fit.terms[0].lambda == grid.back()) ++largest;
  }
  EXPECT_GE(largest, 90);
}

// Paired across folds: the same split scores both models. An extra term
// with up to five effective parameters costs about 0.01 nats per row.
TEST(SmoothDeltaLlh, NoiseTermBarelyMoves) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const std::size_t n = 300;
    const auto x = Uniforms(rng, n, 0, 1), z = Uniforms(rng, n, 0, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = std::sin(6.0 * x[i]) + 0.5 * rng.Normal();
    }
    const auto folds = KFold(n, 5, seed);
    const auto base = SmoothDeltaLlh({{"x", x, 6}}, y, folds, LambdaGrid());
    const auto more =
        SmoothDeltaLlh({{"x", x, 6}, {"z", z, 6}}, y, folds, LambdaGrid());
    std::vector<double> change;
    for (std::size_t k = 0; k < base.folds.size(); ++k) {
      change.push_back(more.folds[k].delta_llh - base.folds[k].delta_llh);
    }
    const auto s = Summarize(change);
    EXPECT_LT(std::abs(s.mean), 0.05) << seed;
    if (seed == 1) {
      EXPECT_LT(std::abs(s.mean), 2.0 * s.se);
    }
  }
}

TEST(FitSmooth, Errors) {
  const std::vector<double> y = {1, 2, 3};
  EXPECT_THROW(FitSmooth(y, {}, LambdaGrid()), ConfigError);
  const std::vector<double> x = {1, 2};
  EXPECT_THROW(FitSmooth(y, {{"x", x, 3}}, LambdaGrid()), Error);
}

TEST(LambdaGrid, Default) {
  const auto g = LambdaGrid();
  ASSERT_EQ(g.size(), 17u);
  EXPECT_NEAR(g.front(), 1e-4, 1e-18);
  EXPECT_NEAR(g.back(), 1e4, 1e-8);
  EXPECT_NEAR(g[8], 1.0, 1e-12);
}

}  // namespace
}  // namespace ctxread
