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

#include "ctxread/regression.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ctxread/corpus.h"
#include "ctxread/error.h"
#include "ctxread/random.h"
#include "oracles.h"

namespace ctxread {
namespace {

std::vector<double> Noise(Rng& rng, std::size_t n, double sd = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = sd * rng.Normal();
  return v;
}

TEST(OlsFit, ExactLine) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * v);
  const auto fit = OlsFit(DesignMatrix({{"x", x, ""}}), y);
  EXPECT_NEAR(fit.Coefficient("x"), 2.0, 1e-12);
  EXPECT_NEAR(fit.Coefficient(DesignMatrix::kIntercept), 0.0, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(OlsFit, ConstantResponse) {
  const std::vector<double> x = {1, 4, 2, 8, 5};
  const std::vector<double> z = {0, 1, 0, 1, 1};
  const std::vector<double> y(5, 3.0);
  const auto fit = OlsFit(DesignMatrix({{"x", x, ""}, {"z", z, ""}}), y);
  EXPECT_NEAR(fit.Coefficient("x"), 0.0, 1e-12);
  EXPECT_NEAR(fit.Coefficient("z"), 0.0, 1e-12);
  EXPECT_EQ(fit.r2, 0.0);
}

TEST(OlsFit, MatchesPseudoinverseAndClassicalErrors) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 60;
    const auto a = Noise(rng, n), b = Noise(rng, n), c = Noise(rng, n, 4.0);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 1.0 + 0.5 * a[i] - 2.0 * b[i] + 0.1 * c[i] + rng.Normal();
    }
    const DesignMatrix x({{"a", a, ""}, {"b", b, ""}, {"c", c, ""}});
    const auto fit = OlsFit(x, y);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    const auto beta = oracle::PinvSolve(x.matrix(), yv);
    for (Eigen::Index j = 0; j < 4; ++j) {
      EXPECT_NEAR(fit.coefficients(j), beta(j), 1e-8);
    }
    const Eigen::VectorXd resid = yv - x.matrix() * beta;
    const double sigma2 = resid.squaredNorm() / (n - 4);
    const Eigen::MatrixXd cov =
        sigma2 * (x.matrix().transpose() * x.matrix()).inverse();
    for (Eigen::Index j = 0; j < 4; ++j) {
      EXPECT_NEAR(fit.std_errors(j), std::sqrt(cov(j, j)), 1e-10);
    }
    EXPECT_NEAR(fit.residual_variance, resid.squaredNorm() / n, 1e-10);
    EXPECT_NEAR(fit.r2, oracle::R2Of(x.matrix(), yv), 1e-10);
  }
}

TEST(OlsFit, RankDeficiencyNamesColumns) {
  const std::vector<double> a = {1, 2, 3, 4, 5, 6};
  const std::vector<double> b = {2, 4, 6, 8, 10, 12};
  const std::vector<double> y = {1, 3, 2, 5, 4, 6};
  try {
    OlsFit(DesignMatrix({{"a", a, ""}, {"b", b, ""}}), y);
    FAIL();
  } catch (const RankDeficiencyError& e) {
    EXPECT_FALSE(e.dependent_columns().empty());
  }
}

TEST(OlsFit, Errors) {
  const std::vector<double> a = {1, 2};
  const std::vector<double> y = {1, 2};
  EXPECT_THROW(OlsFit(DesignMatrix({{"a", a, ""}}), y), SizeError);
  const std::vector<double> b = {1, 2, 3};
  EXPECT_THROW(DesignMatrix({{"a", a, ""}, {"b", b, ""}}), AlignmentError);
  EXPECT_THROW(DesignMatrix({{"a", a, ""}, {"a", a, ""}}), ConfigError);
}

TEST(GaussianLoglik, MatchesClosedForm) {
  const std::vector<double> pred = {1.0, 2.0, -0.5};
  const std::vector<double> y = {1.3, 1.1, 0.0};
  const auto ll = GaussianLoglik(pred, 0.7, y);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(ll[i], oracle::NormalLogDensity(y[i], pred[i], 0.7), 1e-14);
  }
}

TEST(GaussianLoglik, PerfectFitUsesFloor) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {2, 4, 6, 8};
  const DesignMatrix d({{"x", x, ""}});
  const auto fit = OlsFit(d, y);
  for (double v : GaussianLoglik(fit, d, y, 1e-6)) {
    EXPECT_NEAR(v, oracle::NormalLogDensity(0.0, 0.0, 1e-6), 1e-6);
    EXPECT_GT(v, 5.0);
  }
  const std::vector<double> flat = {3, 3, 3, 3};
  const DesignMatrix base = DesignMatrix::InterceptOnly(4);
  const auto mean_fit = OlsFit(base, flat);
  EXPECT_EQ(mean_fit.residual_variance, 0.0);
  for (double v : GaussianLoglik(mean_fit, base, flat)) {
    EXPECT_NEAR(v, oracle::NormalLogDensity(0.0, 0.0, 1e-8), 1e-6);
  }
}

TEST(DeltaLlh, SameModelIsZero) {
  Rng rng(2);
  const auto a = Noise(rng, 30), y = Noise(rng, 30);
  const DesignMatrix d({{"a", a, ""}});
  const auto fit = OlsFit(d, y);
  EXPECT_EQ(DeltaLlh(fit, d, fit, d, y), 0.0);
}

struct CvDelta {
  MeanAndError summary;
};

CvDelta CrossValidate(const std::vector<double>& x, const std::vector<double>& y,
                      std::uint64_t seed) {
  const auto folds = KFold(y.size(), 10, seed);
  std::vector<double> deltas;
  for (std::size_t k = 0; k < 10; ++k) {
    const auto tr = folds.TrainRows(k), te = folds.TestRows(k);
    const DesignMatrix dtr({{"x", Gather(x, tr), ""}});
    const DesignMatrix dte({{"x", Gather(x, te), ""}});
    const auto ytr = Gather(y, tr), yte = Gather(y, te);
    const auto target = OlsFit(dtr, ytr);
    const auto base = OlsFit(DesignMatrix::InterceptOnly(tr.size()), ytr);
    deltas.push_back(DeltaLlh(target, dte, base,
                              DesignMatrix::InterceptOnly(te.size()), yte));
  }
  return {Summarize(deltas)};
}

TEST(DeltaLlh, StrongPredictorIsPositive) {
  Rng rng(4);
  const auto x = Noise(rng, 500);
  std::vector<double> y(500);
  for (std::size_t i = 0; i < 500; ++i) y[i] = 3.0 * x[i] + rng.Normal();
  EXPECT_GT(CrossValidate(x, y, 1).summary.mean, 0.5);
}

TEST(DeltaLlh, NoisePredictorIsNearZero) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(100 + seed);
    const auto x = Noise(rng, 500), y = Noise(rng, 500);
    const auto cv = CrossValidate(x, y, seed).summary;
    EXPECT_LT(std::abs(cv.mean), 0.02) << seed;
    if (seed == 1) {
      EXPECT_LT(std::abs(cv.mean), 2.0 * cv.se);
    }
  }
}

TEST(Summarize, MeanAndStandardError) {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto s = Summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

}  // namespace
}  // namespace ctxread
