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

// Predictors as random variables over (context, next symbol) pairs.
//
// The probability space is contexts times next symbols, weighted by the
// normalized prefix probability of the context times the conditional
// probability of the symbol. Inner products are expectations under that
// measure. Exact mode enumerates the measure from an AutoregressiveLM up to
// a length budget; sample mode works on plain vectors drawn from a corpus,
// where the same projection becomes residualization.

#ifndef CTXREAD_HILBERT_H_
#define CTXREAD_HILBERT_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ctxread/lm.h"

namespace ctxread {

struct MeasureRow {
  // A literal context ("a b") or, for rows produced by MeasureTable::FromLM,
  // a context class "<length>|<state key>" that stands for every context of
  // that length ending in that state.
  std::string context;
  std::size_t context_length = 0;
  std::size_t state = 0;
  Symbol next{};
  double weight = 0.0;
};

class MeasureTable {
 public:
  // Weights must be positive and finite, and their total must lie in
  // [1 - tail_mass - 1e-9, 1 + 1e-9].
  MeasureTable(std::vector<MeasureRow> rows, double tail_mass);

  // Enumerates contexts up to budget.max_len grouped by (length, state).
  // Every predictor that depends on the context only through the model
  // state and the context length takes a single value per row, so sums over
  // this table equal sums over the literal contexts. Throws ConvergenceError
  // when the unenumerated mass exceeds budget.tail_tol.
  static std::shared_ptr<const MeasureTable> FromLM(
      const AutoregressiveLM& lm, const EnumerationBudget& budget);

  std::size_t size() const { return rows_.size(); }
  const std::vector<MeasureRow>& rows() const { return rows_; }
  std::span<const double> weights() const { return weights_; }
  double tail_mass() const { return tail_mass_; }
  double total_mass() const { return total_mass_; }

 private:
  std::vector<MeasureRow> rows_;
  std::vector<double> weights_;
  double tail_mass_;
  double total_mass_;
};

class RandomVariableTable {
 public:
  // One finite value per row of `measure`.
  RandomVariableTable(std::shared_ptr<const MeasureTable> measure,
                      std::string label, std::vector<double> values);

  static RandomVariableTable FromFunction(
      std::shared_ptr<const MeasureTable> measure, std::string label,
      const std::function<double(const MeasureRow&)>& fn);

  const std::shared_ptr<const MeasureTable>& measure() const {
    return measure_;
  }
  const std::string& label() const { return label_; }
  std::span<const double> values() const { return values_; }

  RandomVariableTable Scaled(double a) const;
  // a * this + b * other.
  RandomVariableTable Combine(double a, const RandomVariableTable& other,
                              double b) const;

 private:
  std::shared_ptr<const MeasureTable> measure_;
  std::string label_;
  std::vector<double> values_;
};

// Surprisal, frequency, PMI and unit length as random variables.
// Length of EOS is 0.
struct PredictorVariables {
  RandomVariableTable surprisal;
  RandomVariableTable frequency;
  RandomVariableTable pmi;
  RandomVariableTable length;
};
PredictorVariables MakePredictorVariables(
    const std::shared_ptr<const MeasureTable>& measure,
    const AutoregressiveLM& lm, const UnigramLM& unigram);

struct ProjectionCoefficient {
  double alpha = 0.0;
  double x_mean = 0.0;
  double z_mean = 0.0;
};

// Sum over rows of weight * x * y. Throws AlignmentError unless both sit on
// the same MeasureTable instance.
double InnerProduct(const RandomVariableTable& x, const RandomVariableTable& y);

// Expectation under the (renormalized) enumerated measure.
double Expectation(const RandomVariableTable& x);

// alpha = <x, z> / <z, z>, after centering both when `center` is set.
ProjectionCoefficient ProjectionOnto(const RandomVariableTable& x,
                                     const RandomVariableTable& z, bool center);

// x - alpha z: the projection of x onto the orthogonal complement of z.
// With `center`, both are mean-centered first and the result has zero
// covariance with z. Throws DegenerateError when z vanishes.
RandomVariableTable ProjectComplement(const RandomVariableTable& x,
                                      const RandomVariableTable& z,
                                      bool center);

// Sample analogue: center both vectors, then x_c - (x_c.z_c / z_c.z_c) z_c.
std::vector<double> SampleOrthogonalize(std::span<const double> x,
                                        std::span<const double> z);

// Means and slope estimated on training rows only.
ProjectionCoefficient FitProjection(std::span<const double> x_train,
                                    std::span<const double> z_train);

// (x - x_mean) - alpha (z - z_mean), for any rows.
std::vector<double> ApplyProjection(const ProjectionCoefficient& coef,
                                    std::span<const double> x,
                                    std::span<const double> z);

}  // namespace ctxread

#endif  // CTXREAD_HILBERT_H_
