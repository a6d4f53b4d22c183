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

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctxread/error.h"
#include "ctxread/io.h"
#include "ctxread/numeric.h"

namespace ctxread {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// A term after the constraint and penalty scaling, on the training rows.
struct PreparedTerm {
  std::string name;
  CrBasis basis;
  MatrixXd constraint;  // k x (k - 1)
  MatrixXd design;      // n x (k - 1)
  MatrixXd root;        // E with E'E = scaled constrained penalty
  double scale = 1.0;
  Index offset = 0;     // first column in the full design
};

struct Prepared {
  std::vector<PreparedTerm> terms;
  MatrixXd x;       // intercept plus term designs
  MatrixXd r0;      // R of x = Q0 R0
  VectorXd qty;     // first p entries of Q0' y
  VectorXd y;
  double sst = 0.0;
};

struct Solved {
  VectorXd beta;
  VectorXd fitted;
  double sse = 0.0;
  double edf = 0.0;
  std::vector<double> term_edf;
};

Prepared Prepare(std::span<const double> y,
                 const std::vector<SmoothTerm>& terms) {
  if (terms.empty()) throw ConfigError("a smooth model needs at least one term");
  const std::size_t n = y.size();
  Prepared p;
  p.y = Eigen::Map<const VectorXd>(y.data(), static_cast<Index>(n));
  Index cols = 1;
  for (const auto& t : terms) {
    if (t.x.size() != n) {
      throw AlignmentError("smooth term '" + t.name + "' has " +
                           std::to_string(t.x.size()) + " rows, expected " +
                           std::to_string(n));
    }
    CrBasis basis(t.x, t.k);
    const MatrixXd raw = basis.Evaluate(t.x);
    const Index k = static_cast<Index>(basis.k());
    // Null space of the column sums gives the sum-to-zero constraint.
    const VectorXd c = raw.colwise().sum().transpose();
    Eigen::HouseholderQR<MatrixXd> cqr(c);
    MatrixXd q = MatrixXd::Identity(k, k);
    q.applyOnTheLeft(cqr.householderQ());
    MatrixXd z = q.rightCols(k - 1);
    MatrixXd design = raw * z;
    MatrixXd s = z.transpose() * basis.penalty() * z;
    const double scale = (design.transpose() * design).norm() / s.norm();
    s *= scale;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
    const VectorXd ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    MatrixXd root = ev.asDiagonal() * eig.eigenvectors().transpose();
    p.terms.push_back({t.name, std::move(basis), std::move(z),
                       std::move(design), std::move(root), scale, cols});
    cols += k - 1;
  }
  if (static_cast<Index>(n) <= cols) {
    throw SizeError("smooth model with " + std::to_string(cols) +
                    " coefficients needs more than " + std::to_string(n) +
                    " rows");
  }
  p.x.resize(static_cast<Index>(n), cols);
  p.x.col(0).setOnes();
  for (const auto& t : p.terms) {
    p.x.middleCols(t.offset, t.design.cols()) = t.design;
  }
  Eigen::HouseholderQR<MatrixXd> qr0(p.x);
  p.r0 = qr0.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  VectorXd qty = p.y;
  qty.applyOnTheLeft(qr0.householderQ().transpose());
  p.qty = qty.head(cols);
  const auto centered = Centered(y);
  p.sst = PairwiseDot(centered, centered);
  return p;
}

// Penalized least squares through the small system [R0; sqrt(lambda) E].
Solved Solve(const Prepared& p, std::span<const double> lambdas) {
  const Index cols = p.x.cols();
  Index penalty_rows = 0;
  for (const auto& t : p.terms) penalty_rows += t.root.rows();
  MatrixXd a = MatrixXd::Zero(cols + penalty_rows, cols);
  a.topRows(cols) = p.r0;
  Index row = cols;
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const auto& t = p.terms[i];
    if (!(lambdas[i] >= 0.0) || !std::isfinite(lambdas[i])) {
      throw ConfigError("smoothing parameters must be finite and >= 0");
    }
    a.block(row, t.offset, t.root.rows(), t.root.cols()) =
        std::sqrt(lambdas[i]) * t.root;
    row += t.root.rows();
  }
  VectorXd rhs = VectorXd::Zero(a.rows());
  rhs.head(cols) = p.qty;

  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols) {
    throw DegenerateError("penalized smooth system is singular (rank " +
                          std::to_string(qr.rank()) + " of " +
                          std::to_string(cols) + ")");
  }
  Solved s;
  s.beta = qr.solve(rhs);
  s.fitted = p.x * s.beta;
  const VectorXd resid = p.y - s.fitted;
  s.sse = resid.squaredNorm();

  // Influence trace: with A P = Q R, the hat matrix is Q1 Q1' where Q1 is
  // the block of Q facing the data rows.
  MatrixXd thin = MatrixXd::Identity(a.rows(), cols);
  thin.applyOnTheLeft(qr.householderQ());
  const MatrixXd q1 = thin.topRows(cols);
  s.edf = q1.squaredNorm();
  const MatrixXd r = qr.matrixR().topLeftCorner(cols, cols)
                         .triangularView<Eigen::Upper>();
  const MatrixXd m = r.triangularView<Eigen::Upper>().solve(
      (q1.transpose() * q1) * r);
  VectorXd diag(cols);
  const auto& perm = qr.colsPermutation().indices();
  for (Index j = 0; j < cols; ++j) diag(perm(j)) = m(j, j);
  for (const auto& t : p.terms) {
    s.term_edf.push_back(diag.segment(t.offset, t.design.cols()).sum());
  }
  return s;
}

SmoothFit Assemble(const Prepared& p, const Solved& s,
                   std::span<const double> lambdas) {
  SmoothFit fit;
  fit.n = static_cast<std::size_t>(p.y.size());
  fit.intercept = s.beta(0);
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const auto& t = p.terms[i];
    fit.terms.push_back({t.name, t.basis, t.constraint,
                         s.beta.segment(t.offset, t.design.cols()), t.scale,
                         lambdas[i], s.term_edf[i]});
  }
  fit.edf = s.edf;
  fit.gcv = GcvScore(fit.n, s.sse, s.edf);
  fit.residual_variance = s.sse / static_cast<double>(fit.n);
  fit.r2 = p.sst > 0.0 ? 1.0 - s.sse / p.sst : 0.0;
  fit.fitted.assign(s.fitted.data(), s.fitted.data() + s.fitted.size());
  return fit;
}

}  // namespace

CrBasis::CrBasis(std::span<const double> x, std::size_t k) {
  if (k < 3) throw ConfigError("a cubic regression spline needs k >= 3");
  std::vector<double> u(x.begin(), x.end());
  for (double v : u) {
    if (!std::isfinite(v)) throw DegenerateError("spline input is not finite");
  }
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  if (u.size() < k) {
    throw DegenerateError("spline with k = " + std::to_string(k) + " needs " +
                          std::to_string(k) + " distinct values, got " +
                          std::to_string(u.size()));
  }
  const double m1 = static_cast<double>(u.size() - 1);
  for (std::size_t i = 0; i < k; ++i) {
    const double h = m1 * static_cast<double>(i) / static_cast<double>(k - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    knots_.push_back(lo + 1 < u.size() ? u[lo] + frac * (u[lo + 1] - u[lo])
                                       : u[lo]);
  }
  Build();
}

CrBasis::CrBasis(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 3) throw ConfigError("a cubic regression spline needs k >= 3");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw ConfigError("spline knots must be strictly increasing");
    }
  }
  Build();
}

void CrBasis::Build() {
  const Index k = static_cast<Index>(knots_.size());
  std::vector<double> h(k - 1);
  for (Index j = 0; j + 1 < k; ++j) h[j] = knots_[j + 1] - knots_[j];
  b_ = MatrixXd::Zero(k - 2, k - 2);
  d_ = MatrixXd::Zero(k - 2, k);
  for (Index i = 0; i < k - 2; ++i) {
    // Continuity of the first derivative at interior knot i + 1.
    b_(i, i) = (h[i] + h[i + 1]) / 3.0;
    if (i > 0) b_(i, i - 1) = h[i] / 6.0;
    if (i + 1 < k - 2) b_(i, i + 1) = h[i + 1] / 6.0;
    d_(i, i) = 1.0 / h[i];
    d_(i, i + 1) = -1.0 / h[i] - 1.0 / h[i + 1];
    d_(i, i + 2) = 1.0 / h[i + 1];
  }
  Eigen::LDLT<MatrixXd> ldlt(b_);
  const MatrixXd binv_d = ldlt.solve(d_);
  f_ = MatrixXd::Zero(k, k);
  f_.middleRows(1, k - 2) = binv_d;
  s_ = d_.transpose() * binv_d;
  s_ = 0.5 * (s_ + s_.transpose());
}

MatrixXd CrBasis::Evaluate(std::span<const double> x) const {
  const Index k = static_cast<Index>(knots_.size());
  MatrixXd out = MatrixXd::Zero(static_cast<Index>(x.size()), k);
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double v = x[r];
    if (!std::isfinite(v)) throw DegenerateError("spline input is not finite");
    auto row = out.row(static_cast<Index>(r));
    if (v < knots_.front()) {
      const double h = knots_[1] - knots_[0];
      const double dx = v - knots_[0];
      row(0) += 1.0 - dx / h;
      row(1) += dx / h;
      row -= dx * h / 6.0 * f_.row(1);
      continue;
    }
    if (v > knots_.back()) {
      const double h = knots_[k - 1] - knots_[k - 2];
      const double dx = v - knots_[k - 1];
      row(k - 1) += 1.0 + dx / h;
      row(k - 2) -= dx / h;
      row += dx * h / 6.0 * f_.row(k - 2);
      continue;
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), v);
    Index j = static_cast<Index>(it - knots_.begin()) - 1;
    j = std::clamp<Index>(j, 0, k - 2);
    const double h = knots_[j + 1] - knots_[j];
    const double am = (knots_[j + 1] - v) / h;
    const double ap = (v - knots_[j]) / h;
    const double cm = (am * am * am - am) * h * h / 6.0;
    const double cp = (ap * ap * ap - ap) * h * h / 6.0;
    row(j) += am;
    row(j + 1) += ap;
    row += cm * f_.row(j) + cp * f_.row(j + 1);
  }
  return out;
}

MatrixXd CrBasisMatrix(std::span<const double> x, std::size_t k) {
  return CrBasis(x, k).Evaluate(x);
}

std::vector<double> LambdaGrid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
    throw ConfigError("lambda grid needs 0 < lo <= hi and at least one point");
  }
  if (count == 1) return {lo};
  std::vector<double> grid(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) /
                                     static_cast<double>(count - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

double GcvScore(std::size_t n, double sse, double edf) {
  const double dn = static_cast<double>(n);
  if (!(edf < dn)) return std::numeric_limits<double>::infinity();
  return dn * sse / ((dn - edf) * (dn - edf));
}

SmoothFit FitSmoothFixed(std::span<const double> y,
                         const std::vector<SmoothTerm>& terms,
                         std::span<const double> lambdas) {
  if (lambdas.size() != terms.size()) {
    throw ConfigError("need one smoothing parameter per term");
  }
  const Prepared p = Prepare(y, terms);
  return Assemble(p, Solve(p, lambdas), lambdas);
}

SmoothFit FitSmooth(std::span<const double> y,
                    const std::vector<SmoothTerm>& terms,
                    std::span<const double> lambda_grid) {
  if (lambda_grid.empty()) throw ConfigError("empty lambda grid");
  std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
  std::sort(grid.begin(), grid.end());
  const Prepared p = Prepare(y, terms);
  const std::size_t t_count = terms.size();
  std::vector<std::size_t> pick(t_count, grid.size() / 2);
  auto lambdas_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> l(t_count);
    for (std::size_t i = 0; i < t_count; ++i) l[i] = grid[idx[i]];
    return l;
  };
  auto score = [&](const std::vector<std::size_t>& idx) {
    const Solved s = Solve(p, lambdas_of(idx));
    return GcvScore(p.y.size(), s.sse, s.edf);
  };
  for (int sweep = 0; sweep < 8; ++sweep) {
    bool changed = false;
    for (std::size_t t = 0; t < t_count; ++t) {
      std::vector<std::size_t> trial = pick;
      std::size_t best = 0;
      double best_score = std::numeric_limits<double>::infinity();
      for (std::size_t g = 0; g < grid.size(); ++g) {
        trial[t] = g;
        const double sc = score(trial);
        if (sc < best_score) {  // ascending grid: ties keep the smaller lambda
          best_score = sc;
          best = g;
        }
      }
      if (best != pick[t]) {
        pick[t] = best;
        changed = true;
      }
    }
    if (!changed || t_count == 1) break;
  }
  const auto lambdas = lambdas_of(pick);
  return Assemble(p, Solve(p, lambdas), lambdas);
}

std::vector<double> PredictSmooth(
    const SmoothFit& fit, const std::vector<std::vector<double>>& columns) {
  if (columns.size() != fit.terms.size()) {
    throw AlignmentError("need one column per smooth term");
  }
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  VectorXd pred = VectorXd::Constant(static_cast<Index>(n), fit.intercept);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != n) {
      throw AlignmentError("smooth prediction columns differ in length");
    }
    const auto& t = fit.terms[i];
    pred += t.basis.Evaluate(columns[i]) * (t.constraint * t.coefficients);
  }
  return {pred.data(), pred.data() + pred.size()};
}

SmoothFoldResult EvaluateSmoothFold(
    std::size_t fold, const std::vector<SmoothTerm>& train_terms,
    const std::vector<std::vector<double>>& test_columns,
    std::span<const double> y_train, std::span<const double> y_test,
    std::span<const double> lambda_grid, double variance_floor) {
  const SmoothFit fit = FitSmooth(y_train, train_terms, lambda_grid);
  const auto ll = GaussianLoglik(PredictSmooth(fit, test_columns),
                                 fit.residual_variance, y_test, variance_floor);
  const FitResult base =
      OlsFit(DesignMatrix::InterceptOnly(y_train.size()), y_train);
  const auto ll_base =
      GaussianLoglik(base, DesignMatrix::InterceptOnly(y_test.size()), y_test,
                     variance_floor);
  SmoothFoldResult r;
  r.fold = fold;
  r.train_r2 = fit.r2;
  r.test_llh = Mean(ll);
  r.delta_llh = DeltaLlh(ll, ll_base);
  for (const auto& t : fit.terms) {
    r.lambdas.push_back(t.lambda);
    r.edfs.push_back(t.edf);
  }
  return r;
}

SmoothCvResult SmoothDeltaLlh(const std::vector<SmoothTerm>& terms,
                              std::span<const double> y,
                              const FoldAssignment& folds,
                              std::span<const double> lambda_grid,
                              double variance_floor) {
  if (folds.fold.size() != y.size()) {
    throw AlignmentError("fold assignment does not match the rows");
  }
  SmoothCvResult out;
  std::vector<double> deltas;
  for (std::size_t f = 0; f < folds.k; ++f) {
    const auto train = folds.TrainRows(f);
    const auto test = folds.TestRows(f);
    std::vector<SmoothTerm> train_terms;
    std::vector<std::vector<double>> test_cols;
    for (const auto& t : terms) {
      train_terms.push_back({t.name, Gather(t.x, train), t.k});
      test_cols.push_back(Gather(t.x, test));
    }
    out.folds.push_back(EvaluateSmoothFold(f, train_terms, test_cols,
                                           Gather(y, train), Gather(y, test),
                                           lambda_grid, variance_floor));
    deltas.push_back(out.folds.back().delta_llh);
  }
  out.delta_llh = Summarize(deltas);
  return out;
}

}  // namespace ctxread
