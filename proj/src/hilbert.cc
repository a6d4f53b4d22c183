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

#include "ctxread/hilbert.h"

#include <cmath>

#include "ctxread/error.h"
#include "ctxread/io.h"
#include "ctxread/numeric.h"

namespace ctxread {
namespace {

// Relative spread below which a projection target counts as vanishing.
constexpr double kDegenerateRatio = 1e-24;

void RequireSameMeasure(const RandomVariableTable& x,
                        const RandomVariableTable& y) {
  if (x.measure() != y.measure()) {
    throw AlignmentError("random variables '" + x.label() + "' and '" +
                         y.label() + "' live on different measure tables");
  }
}

bool Vanishes(double centered_sq, double raw_sq) {
  return !(centered_sq > 0.0) || centered_sq <= kDegenerateRatio * raw_sq;
}

}  // namespace

MeasureTable::MeasureTable(std::vector<MeasureRow> rows, double tail_mass)
    : rows_(std::move(rows)), tail_mass_(tail_mass) {
  if (!(tail_mass_ >= 0.0 && tail_mass_ < 1.0)) {
    throw ConfigError("measure tail mass must lie in [0, 1)");
  }
  weights_.reserve(rows_.size());
  for (const auto& row : rows_) {
    if (!(row.weight > 0.0) || !std::isfinite(row.weight)) {
      throw ConfigError("measure weight for context '" + row.context +
                        "' is not positive");
    }
    weights_.push_back(row.weight);
  }
  total_mass_ = PairwiseSum(weights_);
  if (total_mass_ > 1.0 + 1e-9 || total_mass_ < 1.0 - tail_mass_ - 1e-9) {
    throw ConfigError("measure weights sum to " + FormatDouble(total_mass_) +
                      " with declared tail " + FormatDouble(tail_mass_));
  }
}

std::shared_ptr<const MeasureTable> MeasureTable::FromLM(
    const AutoregressiveLM& lm, const EnumerationBudget& budget) {
  budget.Validate();
  const double normalizer = PrefixNormalizer(lm);
  const auto remaining = ExpectedRemainingPrefixes(lm);
  const std::size_t n = lm.state_count();
  const std::size_t units = lm.alphabet().size();
  const std::size_t symbols = lm.alphabet().symbol_count();
  std::vector<std::string> keys(n);
  for (std::size_t s = 0; s < n; ++s) keys[s] = lm.StateKey(s);

  std::vector<MeasureRow> rows;
  std::vector<double> mass(n, 0.0);
  mass[lm.start_state()] = 1.0;
  double tail = 0.0;
  for (std::size_t len = 0;; ++len) {
    std::vector<double> next(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (mass[s] == 0.0) continue;
      for (std::size_t sym = 0; sym < symbols; ++sym) {
        const double p = lm.Prob(s, Symbol(sym));
        if (p <= 0.0) continue;
        const double w = mass[s] * p / normalizer;
        if (w > 0.0) {
          rows.push_back({std::to_string(len) + "|" + keys[s], len, s,
                          Symbol(sym), w});
        }
        if (sym < units) next[lm.Successor(s, Symbol(sym))] += mass[s] * p;
      }
    }
    tail = PairwiseDot(next, remaining) / normalizer;
    // Stop once the rest is negligible against the tolerance.
    if (len == budget.max_len || tail <= 1e-3 * budget.tail_tol) break;
    mass.swap(next);
  }
  if (tail > budget.tail_tol) {
    throw ConvergenceError("measure enumeration leaves " + FormatDouble(tail) +
                               " of the prefix mass beyond max_len",
                           tail);
  }
  return std::make_shared<const MeasureTable>(std::move(rows), tail);
}

RandomVariableTable::RandomVariableTable(
    std::shared_ptr<const MeasureTable> measure, std::string label,
    std::vector<double> values)
    : measure_(std::move(measure)),
      label_(std::move(label)),
      values_(std::move(values)) {
  if (!measure_) throw ConfigError("random variable without a measure");
  if (values_.size() != measure_->size()) {
    throw AlignmentError("random variable '" + label_ + "' has " +
                         std::to_string(values_.size()) + " values for " +
                         std::to_string(measure_->size()) + " rows");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw DegenerateError("random variable '" + label_ +
                            "' has a non-finite value");
    }
  }
}

RandomVariableTable RandomVariableTable::FromFunction(
    std::shared_ptr<const MeasureTable> measure, std::string label,
    const std::function<double(const MeasureRow&)>& fn) {
  std::vector<double> values;
  values.reserve(measure->size());
  for (const auto& row : measure->rows()) values.push_back(fn(row));
  return RandomVariableTable(std::move(measure), std::move(label),
                             std::move(values));
}

RandomVariableTable RandomVariableTable::Scaled(double a) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= a;
  return RandomVariableTable(measure_, label_, std::move(v));
}

RandomVariableTable RandomVariableTable::Combine(
    double a, const RandomVariableTable& other, double b) const {
  RequireSameMeasure(*this, other);
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = a * values_[i] + b * other.values_[i];
  }
  return RandomVariableTable(measure_, label_ + "+" + other.label_,
                             std::move(v));
}

PredictorVariables MakePredictorVariables(
    const std::shared_ptr<const MeasureTable>& measure,
    const AutoregressiveLM& lm, const UnigramLM& unigram) {
  const auto& alphabet = lm.alphabet();
  auto surprisal = RandomVariableTable::FromFunction(
      measure, "surprisal", [&](const MeasureRow& r) {
        return -std::log(lm.Prob(r.state, r.next));
      });
  auto frequency = RandomVariableTable::FromFunction(
      measure, "frequency", [&](const MeasureRow& r) {
        return -std::log(unigram.Prob(r.next));
      });
  std::vector<double> pmi(measure->size());
  for (std::size_t i = 0; i < pmi.size(); ++i) {
    pmi[i] = frequency.values()[i] - surprisal.values()[i];
  }
  auto length = RandomVariableTable::FromFunction(
      measure, "length", [&](const MeasureRow& r) {
        return alphabet.IsEos(r.next)
                   ? 0.0
                   : static_cast<double>(Utf8Length(alphabet.Name(r.next)));
      });
  return {std::move(surprisal), std::move(frequency),
          RandomVariableTable(measure, "pmi", std::move(pmi)),
          std::move(length)};
}

double InnerProduct(const RandomVariableTable& x,
                    const RandomVariableTable& y) {
  RequireSameMeasure(x, y);
  return PairwiseWeightedDot(x.measure()->weights(), x.values(), y.values());
}

double Expectation(const RandomVariableTable& x) {
  const auto w = x.measure()->weights();
  return PairwiseDot(w, x.values()) / x.measure()->total_mass();
}

ProjectionCoefficient ProjectionOnto(const RandomVariableTable& x,
                                     const RandomVariableTable& z,
                                     bool center) {
  RequireSameMeasure(x, z);
  ProjectionCoefficient coef;
  if (center) {
    coef.x_mean = Expectation(x);
    coef.z_mean = Expectation(z);
  }
  const auto w = x.measure()->weights();
  const std::size_t n = w.size();
  std::vector<double> xc(n), zc(n);
  for (std::size_t i = 0; i < n; ++i) {
    xc[i] = x.values()[i] - coef.x_mean;
    zc[i] = z.values()[i] - coef.z_mean;
  }
  const double zz = PairwiseWeightedDot(w, zc, zc);
  if (Vanishes(zz, PairwiseWeightedDot(w, z.values(), z.values()))) {
    throw DegenerateError("cannot project onto '" + z.label() +
                          "': it vanishes" + (center ? " after centering" : ""));
  }
  coef.alpha = PairwiseWeightedDot(w, xc, zc) / zz;
  return coef;
}

RandomVariableTable ProjectComplement(const RandomVariableTable& x,
                                      const RandomVariableTable& z,
                                      bool center) {
  const ProjectionCoefficient coef = ProjectionOnto(x, z, center);
  std::vector<double> out(x.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (x.values()[i] - coef.x_mean) -
             coef.alpha * (z.values()[i] - coef.z_mean);
  }
  return RandomVariableTable(x.measure(), x.label() + "_perp_" + z.label(),
                             std::move(out));
}

ProjectionCoefficient FitProjection(std::span<const double> x_train,
                                    std::span<const double> z_train) {
  if (x_train.size() != z_train.size()) {
    throw AlignmentError("projection inputs differ in length: " +
                         std::to_string(x_train.size()) + " vs " +
                         std::to_string(z_train.size()));
  }
  if (x_train.size() < 3) {
    throw DegenerateError("projection needs at least 3 rows");
  }
  ProjectionCoefficient coef;
  coef.x_mean = Mean(x_train);
  coef.z_mean = Mean(z_train);
  const std::size_t n = x_train.size();
  std::vector<double> xc(n), zc(n);
  for (std::size_t i = 0; i < n; ++i) {
    xc[i] = x_train[i] - coef.x_mean;
    zc[i] = z_train[i] - coef.z_mean;
  }
  // The (n - 1) denominators of the two sample covariances cancel.
  const double zz = PairwiseDot(zc, zc);
  if (Vanishes(zz, PairwiseDot(z_train, z_train))) {
    throw DegenerateError("cannot residualize against a constant predictor");
  }
  coef.alpha = PairwiseDot(xc, zc) / zz;
  return coef;
}

std::vector<double> ApplyProjection(const ProjectionCoefficient& coef,
                                    std::span<const double> x,
                                    std::span<const double> z) {
  if (x.size() != z.size()) {
    throw AlignmentError("projection inputs differ in length");
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (x[i] - coef.x_mean) - coef.alpha * (z[i] - coef.z_mean);
  }
  return out;
}

std::vector<double> SampleOrthogonalize(std::span<const double> x,
                                        std::span<const double> z) {
  return ApplyProjection(FitProjection(x, z), x, z);
}

}  // namespace ctxread
