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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "ctxread/error.h"
#include "ctxread/io.h"
#include "ctxread/numeric.h"

namespace ctxread {
namespace {

constexpr double kMaxCondition = 1e10;

Eigen::Map<const Eigen::VectorXd> AsVector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

double SumSquares(const Eigen::VectorXd& v) {
  return PairwiseDot(std::span<const double>(v.data(), v.size()),
                     std::span<const double>(v.data(), v.size()));
}

double TotalSumSquares(std::span<const double> y) {
  const auto c = Centered(y);
  return PairwiseDot(c, c);
}

std::size_t LabelIndex(const std::vector<std::string>& labels,
                       const std::string& label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw ConfigError("no coefficient '" + label + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

}  // namespace

DesignMatrix::DesignMatrix(const std::vector<Column>& columns) {
  const std::size_t n = columns.empty() ? 0 : columns.front().values.size();
  x_.resize(static_cast<Eigen::Index>(n),
            static_cast<Eigen::Index>(columns.size() + 1));
  x_.col(0).setOnes();
  labels_.push_back(kIntercept);
  std::set<std::string> seen = {kIntercept};
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& c = columns[j];
    if (c.values.size() != n) {
      throw AlignmentError("column '" + c.name + "' has " +
                           std::to_string(c.values.size()) + " rows, expected " +
                           std::to_string(n));
    }
    if (!seen.insert(c.name).second) {
      throw ConfigError("duplicate design column '" + c.name + "'");
    }
    x_.col(static_cast<Eigen::Index>(j + 1)) = AsVector(c.values);
    labels_.push_back(c.name);
    const std::string group = c.group.empty() ? c.name : c.group;
    column_group_.push_back(group);
    if (std::find(groups_.begin(), groups_.end(), group) == groups_.end()) {
      groups_.push_back(group);
    }
  }
}

DesignMatrix DesignMatrix::InterceptOnly(std::size_t n) {
  DesignMatrix d;
  d.x_ = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), 1);
  d.labels_ = {kIntercept};
  return d;
}

std::vector<std::size_t> DesignMatrix::GroupColumns(std::size_t group) const {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < column_group_.size(); ++j) {
    if (column_group_[j] == groups_.at(group)) cols.push_back(j + 1);
  }
  return cols;
}

DesignMatrix DesignMatrix::RowSubset(std::span<const std::size_t> rows) const {
  DesignMatrix d;
  d.x_.resize(static_cast<Eigen::Index>(rows.size()), x_.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.x_.row(static_cast<Eigen::Index>(i)) =
        x_.row(static_cast<Eigen::Index>(rows[i]));
  }
  d.labels_ = labels_;
  d.column_group_ = column_group_;
  d.groups_ = groups_;
  return d;
}

DesignMatrix DesignMatrix::GroupSubset(unsigned long long mask) const {
  std::vector<std::size_t> keep = {0};
  DesignMatrix d;
  d.labels_ = {kIntercept};
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (!((mask >> g) & 1ULL)) continue;
    d.groups_.push_back(groups_[g]);
    for (std::size_t c : GroupColumns(g)) {
      keep.push_back(c);
      d.labels_.push_back(labels_[c]);
      d.column_group_.push_back(groups_[g]);
    }
  }
  d.x_.resize(x_.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    d.x_.col(static_cast<Eigen::Index>(j)) =
        x_.col(static_cast<Eigen::Index>(keep[j]));
  }
  return d;
}

double FitResult::Coefficient(const std::string& label) const {
  return coefficients(static_cast<Eigen::Index>(LabelIndex(labels, label)));
}

double FitResult::StdError(const std::string& label) const {
  return std_errors(static_cast<Eigen::Index>(LabelIndex(labels, label)));
}

double ConditionNumber(const DesignMatrix& x) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.matrix());
  const Eigen::MatrixXd r =
      qr.matrixR().topRows(x.matrix().cols()).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

FitResult OlsFit(const DesignMatrix& design, std::span<const double> y) {
  const Eigen::MatrixXd& x = design.matrix();
  const auto n = x.rows();
  const auto p = x.cols();
  if (static_cast<std::size_t>(n) != y.size()) {
    throw AlignmentError("design has " + std::to_string(n) +
                         " rows but the response has " +
                         std::to_string(y.size()));
  }
  if (n <= p) {
    throw SizeError("least squares needs more rows (" + std::to_string(n) +
                    ") than columns (" + std::to_string(p) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r =
      qr.matrixR().topRows(p).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  const auto& s = svd.singularValues();
  const double cond =
      s(p - 1) > 0.0 ? s(0) / s(p - 1) : std::numeric_limits<double>::infinity();
  const auto& perm = qr.colsPermutation().indices();
  if (!(cond <= kMaxCondition)) {
    std::vector<std::string> dependent;
    const double r00 = std::abs(r(0, 0));
    for (Eigen::Index k = 0; k < p; ++k) {
      if (std::abs(r(k, k)) <= 1e-10 * r00) {
        dependent.push_back(design.labels()[perm(k)]);
      }
    }
    if (dependent.empty()) dependent.push_back(design.labels()[perm(p - 1)]);
    std::string msg = "design matrix is rank deficient (condition number " +
                      FormatDouble(cond) + "); dependent columns:";
    for (const auto& d : dependent) msg += " " + d;
    throw RankDeficiencyError(msg, std::move(dependent));
  }

  const Eigen::Map<const Eigen::VectorXd> yv = AsVector(y);
  FitResult fit;
  fit.labels = design.labels();
  fit.coefficients = qr.solve(yv);
  fit.n = static_cast<std::size_t>(n);
  const Eigen::VectorXd resid = yv - x * fit.coefficients;
  const double sse = SumSquares(resid);
  fit.residual_variance = sse / static_cast<double>(n);
  const double sst = TotalSumSquares(y);
  fit.r2 = sst > 0.0 ? 1.0 - sse / sst : 0.0;

  // diag((X'X)^-1) from R^-1, undoing the column permutation.
  const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(p, p));
  const double sigma2 = sse / static_cast<double>(n - p);
  fit.std_errors.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    fit.std_errors(perm(k)) = std::sqrt(sigma2 * r_inv.row(k).squaredNorm());
  }
  return fit;
}

std::vector<double> Predict(const FitResult& fit, const DesignMatrix& x) {
  if (static_cast<Eigen::Index>(x.cols()) != fit.coefficients.size()) {
    throw AlignmentError("design has " + std::to_string(x.cols()) +
                         " columns, fit has " +
                         std::to_string(fit.coefficients.size()));
  }
  const Eigen::VectorXd pred = x.matrix() * fit.coefficients;
  return {pred.data(), pred.data() + pred.size()};
}

double RSquared(const FitResult& fit, const DesignMatrix& x,
                std::span<const double> y) {
  const auto pred = Predict(fit, x);
  std::vector<double> resid(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) resid[i] = y[i] - pred[i];
  const double sst = TotalSumSquares(y);
  const double sse = PairwiseDot(resid, resid);
  return sst > 0.0 ? 1.0 - sse / sst : 0.0;
}

std::vector<double> GaussianLoglik(std::span<const double> predictions,
                                   double residual_variance,
                                   std::span<const double> y,
                                   double variance_floor) {
  if (predictions.size() != y.size()) {
    throw AlignmentError("predictions and response differ in length");
  }
  if (!(variance_floor > 0.0)) {
    throw ConfigError("variance floor must be positive");
  }
  const double var = std::max(residual_variance, variance_floor);
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * var);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - predictions[i];
    out[i] = log_norm - 0.5 * e * e / var;
  }
  return out;
}

std::vector<double> GaussianLoglik(const FitResult& fit, const DesignMatrix& x,
                                   std::span<const double> y,
                                   double variance_floor) {
  if (x.rows() != y.size()) {
    throw AlignmentError("test design and response differ in length");
  }
  return GaussianLoglik(Predict(fit, x), fit.residual_variance, y,
                        variance_floor);
}

double DeltaLlh(std::span<const double> target_loglik,
                std::span<const double> baseline_loglik) {
  if (target_loglik.size() != baseline_loglik.size()) {
    throw AlignmentError("log-likelihoods cover different test rows");
  }
  std::vector<double> diff(target_loglik.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = target_loglik[i] - baseline_loglik[i];
  }
  return Mean(diff);
}

double DeltaLlh(const FitResult& target, const DesignMatrix& x_target,
                const FitResult& baseline, const DesignMatrix& x_baseline,
                std::span<const double> y_test, double variance_floor) {
  return DeltaLlh(GaussianLoglik(target, x_target, y_test, variance_floor),
                  GaussianLoglik(baseline, x_baseline, y_test, variance_floor));
}

MeanAndError Summarize(std::span<const double> values) {
  MeanAndError out;
  out.mean = Mean(values);
  if (values.size() > 1) {
    out.se = std::sqrt(SampleVariance(values) /
                       static_cast<double>(values.size()));
  }
  return out;
}

std::vector<double> Gather(std::span<const double> v,
                           std::span<const std::size_t> rows) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

}  // namespace ctxread
