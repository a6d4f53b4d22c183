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

#include "ctxread/numeric.h"

#include <cmath>
#include <stdexcept>

#include "ctxread/error.h"

namespace ctxread {
namespace {

constexpr std::size_t kPairwiseBlock = 16;

template <typename Term>
double Cascade(std::size_t begin, std::size_t end, const Term& term) {
  const std::size_t n = end - begin;
  if (n <= kPairwiseBlock) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = begin + n / 2;
  return Cascade(begin, mid, term) + Cascade(mid, end, term);
}

void RequireSameSize(std::size_t a, std::size_t b) {
  if (a != b) {
    throw AlignmentError("vector length mismatch: " + std::to_string(a) +
                         " vs " + std::to_string(b));
  }
}

}  // namespace

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kFormat:
      return 2;
    case ErrorKind::kIdentity:
      return 3;
    case ErrorKind::kCoverage:
      return 4;
    case ErrorKind::kNumerical:
      return 5;
  }
  return 1;
}

double PairwiseSum(std::span<const double> values) {
  return Cascade(0, values.size(), [&](std::size_t i) { return values[i]; });
}

double PairwiseDot(std::span<const double> a, std::span<const double> b) {
  RequireSameSize(a.size(), b.size());
  return Cascade(0, a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double PairwiseWeightedDot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b) {
  RequireSameSize(w.size(), a.size());
  RequireSameSize(w.size(), b.size());
  return Cascade(0, w.size(),
                 [&](std::size_t i) { return w[i] * a[i] * b[i]; });
}

double Mean(std::span<const double> values) {
  if (values.empty()) throw DegenerateError("mean of an empty column");
  return PairwiseSum(values) / static_cast<double>(values.size());
}

double SampleCovariance(std::span<const double> x, std::span<const double> y) {
  RequireSameSize(x.size(), y.size());
  if (x.size() < 2) throw DegenerateError("covariance needs at least 2 rows");
  const double mx = Mean(x);
  const double my = Mean(y);
  const double s = Cascade(0, x.size(), [&](std::size_t i) {
    return (x[i] - mx) * (y[i] - my);
  });
  return s / static_cast<double>(x.size() - 1);
}

double SampleVariance(std::span<const double> x) {
  return SampleCovariance(x, x);
}

double Correlation(std::span<const double> x, std::span<const double> y) {
  const double vx = SampleVariance(x);
  const double vy = SampleVariance(y);
  if (vx <= 0.0 || vy <= 0.0) return 0.0;
  return SampleCovariance(x, y) / std::sqrt(vx * vy);
}

std::vector<double> Centered(std::span<const double> values) {
  const double m = Mean(values);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] - m;
  return out;
}

}  // namespace ctxread
