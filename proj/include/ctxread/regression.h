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

// Ordinary least squares and Gaussian held-out likelihood.

#ifndef CTXREAD_REGRESSION_H_
#define CTXREAD_REGRESSION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ctxread {

struct Column {
  std::string name;
  std::vector<double> values;
  // LMG group; empty means the column is its own group.
  std::string group;
};

// Intercept plus predictor columns. The intercept is column 0 and belongs
// to no group.
class DesignMatrix {
 public:
  static constexpr const char* kIntercept = "(intercept)";

  // Throws AlignmentError when columns differ in length, ConfigError for
  // duplicate names.
  explicit DesignMatrix(const std::vector<Column>& columns);
  // Intercept-only design with n rows.
  static DesignMatrix InterceptOnly(std::size_t n);

  std::size_t rows() const { return static_cast<std::size_t>(x_.rows()); }
  // Including the intercept.
  std::size_t cols() const { return static_cast<std::size_t>(x_.cols()); }
  const Eigen::MatrixXd& matrix() const { return x_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Distinct groups in order of first appearance.
  const std::vector<std::string>& groups() const { return groups_; }
  // Matrix column indices (intercept excluded) of a group.
  std::vector<std::size_t> GroupColumns(std::size_t group) const;

  DesignMatrix RowSubset(std::span<const std::size_t> rows) const;
  // Keeps the intercept plus the given groups (bit g of `mask`).
  DesignMatrix GroupSubset(unsigned long long mask) const;

 private:
  DesignMatrix() = default;
  Eigen::MatrixXd x_;
  std::vector<std::string> labels_;
  std::vector<std::string> column_group_;  // per predictor column
  std::vector<std::string> groups_;
};

struct FitResult {
  std::vector<std::string> labels;
  Eigen::VectorXd coefficients;
  // Classical standard errors from SSE / (n - p).
  Eigen::VectorXd std_errors;
  // Training MLE, SSE / n.
  double residual_variance = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
  std::optional<int> fold;

  double Coefficient(const std::string& label) const;
  double StdError(const std::string& label) const;
};

// Column-pivoted Householder QR. Throws RankDeficiencyError naming the
// dependent columns when the condition number exceeds 1e10, SizeError with
// fewer rows than columns, AlignmentError when y does not match.
FitResult OlsFit(const DesignMatrix& x, std::span<const double> y);

// Condition number (ratio of extreme singular values).
double ConditionNumber(const DesignMatrix& x);

std::vector<double> Predict(const FitResult& fit, const DesignMatrix& x);

// R^2 of a fit's predictions on (x, y) against the mean of y.
double RSquared(const FitResult& fit, const DesignMatrix& x,
                std::span<const double> y);

// log N(y | x beta, max(sigma^2, variance_floor)) per row, with the training
// residual variance.
std::vector<double> GaussianLoglik(const FitResult& fit, const DesignMatrix& x,
                                   std::span<const double> y,
                                   double variance_floor = 1e-8);
// Same density for arbitrary predictions and residual variance.
std::vector<double> GaussianLoglik(std::span<const double> predictions,
                                   double residual_variance,
                                   std::span<const double> y,
                                   double variance_floor = 1e-8);

// Mean over rows of target minus baseline.
double DeltaLlh(std::span<const double> target_loglik,
                std::span<const double> baseline_loglik);
double DeltaLlh(const FitResult& target, const DesignMatrix& x_target,
                const FitResult& baseline, const DesignMatrix& x_baseline,
                std::span<const double> y_test, double variance_floor = 1e-8);

struct MeanAndError {
  double mean = 0.0;
  // Standard error of the mean across entries (sd / sqrt(n)).
  double se = 0.0;
};
MeanAndError Summarize(std::span<const double> values);

std::vector<double> Gather(std::span<const double> v,
                           std::span<const std::size_t> rows);

}  // namespace ctxread

#endif  // CTXREAD_REGRESSION_H_
