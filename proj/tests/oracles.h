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

// Reference computations for tests. Each one takes a different route from
// the library: forward recursion instead of linear solves, SVD instead of
// QR, explicit orderings instead of subset weights, explicit hat matrices
// instead of the augmented QR.

#ifndef CTXREAD_TESTS_ORACLES_H_
#define CTXREAD_TESTS_ORACLES_H_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ctxread/lm.h"
#include "ctxread/lm_io.h"
#include "ctxread/regression.h"
#include "ctxread/smooth.h"

namespace ctxread::oracle {

inline AutoregressiveLM M0() {
  return ParseLmTsv("state\tunit\tprob\n^\ta\t0.3\n^\tb\t0.2\n^\t$\t0.5\n");
}

inline AutoregressiveLM M1() {
  return ParseLmTsv(
      "state\tunit\tprob\n^\ta\t0.8\n^\t$\t0.2\na\ta\t0.25\na\t$\t0.75\n");
}

// Forward recursion over string lengths. mass[L][s] is the probability of
// having emitted L units and sitting in state s.
struct Forward {
  std::vector<std::vector<double>> mass;
  std::vector<double> string_prob;  // P(|u| = L)
};

inline Forward RunForward(const AutoregressiveLM& lm, std::size_t from,
                          double start_mass, std::size_t max_len) {
  const std::size_t ns = lm.state_count();
  const std::size_t nu = lm.alphabet().size();
  Forward f;
  f.mass.assign(max_len + 1, std::vector<double>(ns, 0.0));
  f.string_prob.assign(max_len + 1, 0.0);
  f.mass[0][from] = start_mass;
  for (std::size_t len = 0; len <= max_len; ++len) {
    for (std::size_t s = 0; s < ns; ++s) {
      const double m = f.mass[len][s];
      if (m == 0.0) continue;
      f.string_prob[len] += m * lm.Prob(s, lm.alphabet().eos());
      if (len == max_len) continue;
      for (std::size_t u = 0; u < nu; ++u) {
        const double p = lm.Prob(s, Symbol(u));
        if (p == 0.0) continue;
        f.mass[len + 1][lm.Successor(s, Symbol(u))] += m * p;
      }
    }
  }
  return f;
}

// P(strings starting with prefix), by the chain rule on the prefix and
// forward recursion over continuations.
inline double EnumPrefixMass(const AutoregressiveLM& lm,
                             const std::vector<std::string>& prefix,
                             std::size_t max_len) {
  std::size_t s = lm.start_state();
  double m = 1.0;
  for (const auto& name : prefix) {
    const Symbol u = lm.alphabet().LookupUnit(name);
    m *= lm.Prob(s, u);
    if (m == 0.0) return 0.0;
    s = lm.Successor(s, u);
  }
  const Forward f = RunForward(lm, s, m, max_len);
  double total = 0.0;
  for (double p : f.string_prob) total += p;
  return total;
}

inline double EnumConditional(const AutoregressiveLM& lm,
                              std::vector<std::string> context,
                              const std::string& next, std::size_t max_len) {
  const double denom = EnumPrefixMass(lm, context, max_len);
  if (next == lm.alphabet().eos_name()) {
    std::size_t s = lm.start_state();
    double m = 1.0;
    for (const auto& name : context) {
      const Symbol u = lm.alphabet().LookupUnit(name);
      m *= lm.Prob(s, u);
      s = lm.Successor(s, u);
    }
    return m * lm.Prob(s, lm.alphabet().eos()) / denom;
  }
  context.push_back(next);
  return EnumPrefixMass(lm, context, max_len) / denom;
}

inline double EnumExpectedLength(const AutoregressiveLM& lm,
                                 std::size_t max_len) {
  const Forward f = RunForward(lm, lm.start_state(), 1.0, max_len);
  double e = 0.0;
  for (std::size_t len = 0; len <= max_len; ++len) {
    e += static_cast<double>(len) * f.string_prob[len];
  }
  return e;
}

// Expected count per string of each unit (EOS last, counted once), over
// 1 + E|u|.
inline std::vector<double> EnumUnigramMinimizer(const AutoregressiveLM& lm,
                                                std::size_t max_len) {
  const Forward f = RunForward(lm, lm.start_state(), 1.0, max_len);
  const std::size_t nu = lm.alphabet().size();
  std::vector<double> counts(nu + 1, 0.0);
  for (std::size_t len = 0; len < max_len; ++len) {
    for (std::size_t s = 0; s < lm.state_count(); ++s) {
      for (std::size_t u = 0; u < nu; ++u) {
        counts[u] += f.mass[len][s] * lm.Prob(s, Symbol(u));
      }
    }
  }
  for (double p : f.string_prob) counts[nu] += p;
  const double z = std::accumulate(counts.begin(), counts.end(), 0.0);
  for (double& c : counts) c /= z;
  return counts;
}

// Least squares through the SVD pseudoinverse.
inline Eigen::VectorXd PinvSolve(const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  Eigen::VectorXd s_inv = svd.singularValues();
  for (Eigen::Index i = 0; i < s_inv.size(); ++i) {
    s_inv(i) = s_inv(i) > 1e-12 * svd.singularValues()(0) ? 1.0 / s_inv(i)
                                                           : 0.0;
  }
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose() * y;
}

inline double R2Of(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd fitted = x * PinvSolve(x, y);
  const double mean = y.mean();
  const double sst = (y.array() - mean).square().sum();
  return 1.0 - (y - fitted).squaredNorm() / sst;
}

// LMG by walking every order of entry. groups[g] lists predictor columns of
// x (column 0 is the intercept).
inline std::vector<double> LmgByOrderings(
    const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
    const std::vector<std::vector<Eigen::Index>>& groups) {
  const std::size_t p = groups.size();
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> shares(p, 0.0);
  double count = 0.0;
  auto r2_of = [&](const std::vector<std::size_t>& in) {
    if (in.empty()) return 0.0;
    std::vector<Eigen::Index> cols = {0};
    for (std::size_t g : in) {
      cols.insert(cols.end(), groups[g].begin(), groups[g].end());
    }
    Eigen::MatrixXd sub(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      sub.col(static_cast<Eigen::Index>(j)) = x.col(cols[j]);
    }
    return R2Of(sub, y);
  };
  do {
    std::vector<std::size_t> in;
    double prev = 0.0;
    for (std::size_t g : order) {
      in.push_back(g);
      const double cur = r2_of(in);
      shares[g] += cur - prev;
      prev = cur;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& s : shares) s /= count;
  return shares;
}

inline double NormalLogDensity(double y, double mean, double variance) {
  const double d = y - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) -
         d * d / (2.0 * variance);
}

// Fitted values and influence trace of a smooth fit, rebuilt from the
// normal equations (X'X + sum lambda_j S_j) b = X'y with an explicit hat
// matrix.
struct HatResult {
  Eigen::VectorXd fitted;
  double edf = 0.0;
};

inline HatResult SmoothByHatMatrix(const SmoothFit& fit,
                                   const std::vector<SmoothTerm>& terms,
                                   std::span<const double> y) {
  const Eigen::Index n = static_cast<Eigen::Index>(y.size());
  Eigen::Index cols = 1;
  for (const auto& t : fit.terms) cols += t.constraint.cols();
  Eigen::MatrixXd x(n, cols);
  Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(cols, cols);
  x.col(0).setOnes();
  Eigen::Index off = 1;
  for (std::size_t i = 0; i < fit.terms.size(); ++i) {
    const auto& t = fit.terms[i];
    const Eigen::Index w = t.constraint.cols();
    x.middleCols(off, w) = t.basis.Evaluate(terms[i].x) * t.constraint;
    pen.block(off, off, w, w) = t.lambda * t.penalty_scale *
                                t.constraint.transpose() * t.basis.penalty() *
                                t.constraint;
    off += w;
  }
  const Eigen::MatrixXd lhs = x.transpose() * x + pen;
  const Eigen::MatrixXd hat =
      x * lhs.fullPivLu().solve(x.transpose());
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  return {hat * yv, hat.trace()};
}

}  // namespace ctxread::oracle

#endif  // CTXREAD_TESTS_ORACLES_H_
