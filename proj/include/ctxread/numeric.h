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

// Small reductions with a fixed summation order. Every reduction in the
// library goes through these so results do not depend on threading or on
// the order in which a caller happened to build its vectors.

#ifndef CTXREAD_NUMERIC_H_
#define CTXREAD_NUMERIC_H_

#include <cstddef>
#include <span>
#include <vector>

namespace ctxread {

// Pairwise (cascade) summation.
double PairwiseSum(std::span<const double> values);

// Pairwise sum of a[i] * b[i]. Sizes must match.
double PairwiseDot(std::span<const double> a, std::span<const double> b);

// Pairwise sum of w[i] * a[i] * b[i].
double PairwiseWeightedDot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b);

double Mean(std::span<const double> values);

// Unbiased (n - 1) sample covariance.
double SampleCovariance(std::span<const double> x, std::span<const double> y);
double SampleVariance(std::span<const double> x);

// Pearson correlation; 0 when either side has no spread.
double Correlation(std::span<const double> x, std::span<const double> y);

std::vector<double> Centered(std::span<const double> values);

}  // namespace ctxread

#endif  // CTXREAD_NUMERIC_H_
