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

// Additive models with penalized natural cubic regression splines.
//
// Each smooth term is a natural cubic spline parameterized by its values at
// k knots placed at quantiles of the distinct training values. The
// roughness penalty is the integrated squared second derivative, whose null
// space is the linear functions. Terms carry a sum-to-zero constraint over
// the training rows so that the intercept is identifiable. Smoothing
// parameters are chosen per term by generalized cross-validation,
//
//   GCV = n * SSE / (n - edf)^2,
//
// where edf is the trace of the influence matrix.

#ifndef CTXREAD_SMOOTH_H_
#define CTXREAD_SMOOTH_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctxread/corpus.h"
#include "ctxread/regression.h"

namespace ctxread {

class CrBasis {
 public:
  // Throws DegenerateError with fewer than k distinct values, ConfigError
  // for k < 3.
  CrBasis(std::span<const double> x, std::size_t k);
  // Explicit strictly increasing knots.
  explicit CrBasis(std::vector<double> knots);

  std::size_t k() const { return knots_.size(); }
  const std::vector<double>& knots() const { return knots_; }

  // n x k. Column j is the natural spline that is 1 at knot j and 0 at the
  // others. Linear beyond the boundary knots.
  Eigen::MatrixXd Evaluate(std::span<const double> x) const;

  // k x k map from knot values to second derivatives at the knots (first
  // and last rows are zero).
  const Eigen::MatrixXd& second_derivatives() const { return f_; }
  // Integrated squared second derivative as a quadratic form in the knot
  // values.
  const Eigen::MatrixXd& penalty() const { return s_; }
  // The tridiagonal continuity system B gamma = D beta.
  const Eigen::MatrixXd& system_lhs() const { return b_; }
  const Eigen::MatrixXd& system_rhs() const { return d_; }

 private:
  void Build();

  std::vector<double> knots_;
  Eigen::MatrixXd b_, d_, f_, s_;
};

// Basis matrix of `x` on its own quantile knots.
Eigen::MatrixXd CrBasisMatrix(std::span<const double> x, std::size_t k);

struct SmoothTerm {
  std::string name;
  std::vector<double> x;
  std::size_t k = 6;
};

struct SmoothTermFit {
  std::string name;
  CrBasis basis;
  // k x (k - 1) sum-to-zero reparameterization.
  Eigen::MatrixXd constraint;
  Eigen::VectorXd coefficients;  // length k - 1
  double penalty_scale = 1.0;
  double lambda = 0.0;
  double edf = 0.0;
};

struct SmoothFit {
  double intercept = 0.0;
  std::vector<SmoothTermFit> terms;
  double gcv = 0.0;
  // SSE / n on the training rows.
  double residual_variance = 0.0;
  double r2 = 0.0;
  // Total, intercept included.
  double edf = 0.0;
  std::size_t n = 0;
  std::vector<double> fitted;
};

// 17 log-spaced values from 1e-4 to 1e4 by default.
std::vector<double> LambdaGrid(double lo = 1e-4, double hi = 1e4,
                               std::size_t count = 17);

double GcvScore(std::size_t n, double sse, double edf);

// Fixed smoothing parameters, one per term.
SmoothFit FitSmoothFixed(std::span<const double> y,
                         const std::vector<SmoothTerm>& terms,
                         std::span<const double> lambdas);

// Coordinate-wise GCV search over the grid; ties go to the smaller lambda.
// Throws DegenerateError when the penalized system is singular.
SmoothFit FitSmooth(std::span<const double> y,
                    const std::vector<SmoothTerm>& terms,
                    std::span<const double> lambda_grid);

// One column per term, in the order of fit.terms.
std::vector<double> PredictSmooth(
    const SmoothFit& fit, const std::vector<std::vector<double>>& columns);

struct SmoothFoldResult {
  std::size_t fold = 0;
  double train_r2 = 0.0;
  double test_llh = 0.0;
  double delta_llh = 0.0;
  std::vector<double> lambdas;
  std::vector<double> edfs;
};

// Fits on the training rows and scores the held-out rows against the
// training-mean model.
SmoothFoldResult EvaluateSmoothFold(std::size_t fold,
                                    const std::vector<SmoothTerm>& train_terms,
                                    const std::vector<std::vector<double>>& test_columns,
                                    std::span<const double> y_train,
                                    std::span<const double> y_test,
                                    std::span<const double> lambda_grid,
                                    double variance_floor = 1e-8);

struct SmoothCvResult {
  std::vector<SmoothFoldResult> folds;
  MeanAndError delta_llh;
};

// Held-out log-likelihood gain of the smooth model over the training-mean
// model, per fold, with the fold-to-fold standard error.
SmoothCvResult SmoothDeltaLlh(const std::vector<SmoothTerm>& terms,
                              std::span<const double> y,
                              const FoldAssignment& folds,
                              std::span<const double> lambda_grid,
                              double variance_floor = 1e-8);

}  // namespace ctxread

#endif  // CTXREAD_SMOOTH_H_
