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

// The cross-validated reading-time analysis.
//
// Three linear models over a predictor table, each with previous-token
// (spillover) copies of its predictors:
//   surprisal: surprisal, frequency, length
//   pmi:       pmi, frequency, length
//   ortho:     surprisal residualized on frequency, frequency, length
//              residualized on frequency
// Within every fold, predictors are standardized and residualized with
// training-row statistics only. Each model reports per-fold fits, LMG
// shares on the training rows, and held-out delta log-likelihood against
// the training-mean model.

#ifndef CTXREAD_ANALYSIS_H_
#define CTXREAD_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxread/identities.h"
#include "ctxread/lmg.h"
#include "ctxread/predictors.h"
#include "ctxread/regression.h"
#include "ctxread/smooth.h"

namespace ctxread {

enum class ModelKind { kSurprisal, kPmi, kOrtho };
enum class LmgGrouping { kPaired, kSeparate };
enum class FoldUnit { kToken, kDocument };
enum class ProjectionStats { kTrainingFold, kGlobal };

std::string ModelName(ModelKind kind, bool swap_frequency);

struct AnalysisOptions {
  std::vector<ModelKind> models = {ModelKind::kSurprisal, ModelKind::kPmi,
                                   ModelKind::kOrtho};
  bool include_length = true;
  // Ortho model residualizes frequency on surprisal instead.
  bool swap_frequency = false;
  bool smooth = false;
  LmgGrouping grouping = LmgGrouping::kPaired;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  FoldUnit fold_unit = FoldUnit::kToken;
  ProjectionStats projection_stats = ProjectionStats::kTrainingFold;
  std::size_t smooth_k = 6;
  std::vector<double> lambda_grid = LambdaGrid();
  double variance_floor = 1e-8;
  // Skip LMG (used by callers that only need fits).
  bool lmg = true;
};

struct ModelFold {
  std::size_t fold = 0;
  double train_r2 = 0.0;
  double test_r2 = 0.0;
  std::vector<std::string> labels;
  std::vector<double> coefficients;
  double test_llh = 0.0;
  double delta_llh = 0.0;
  std::optional<LmgReport> lmg;
};

struct ModelReport {
  std::string name;
  std::vector<ModelFold> folds;
  std::vector<std::string> groups;
  // Mean over folds of the LMG shares and of the training R^2.
  std::vector<double> mean_shares;
  double mean_total_r2 = 0.0;
  MeanAndError delta_llh;
  // All rows, unstandardized predictors.
  FitResult full_fit;
};

struct GroupDeltaLlh {
  std::string group;
  MeanAndError delta_llh;
};

struct OrthoDiagnostics {
  // Largest |training-fold correlation| between each residualized
  // predictor and the predictor it was residualized on.
  std::vector<std::string> names;
  std::vector<double> max_abs_corr;
};

struct SmoothModelReport {
  std::string name;
  std::vector<std::string> terms;
  std::size_t k = 6;
  SmoothCvResult cv;
};

struct AnalysisReport {
  std::size_t rows = 0;
  std::size_t folds = 0;
  std::vector<ModelReport> models;
  EquivalenceReport equivalence;
  // Largest spread of per-fold training R^2 across the linear models.
  double max_r2_spread = 0.0;
  OrthoDiagnostics ortho;
  std::vector<GroupDeltaLlh> predictor_delta_llh;
  std::vector<SmoothModelReport> smooth;
};

// Rows with a reading time and spillover values. Throws IdentityError when
// the surprisal/PMI identities fail or the linear models disagree on R^2 by
// more than 1e-10.
AnalysisReport RunAnalysis(std::span<const PredictorRecord> table,
                           const AnalysisOptions& options);

// report.json and lmg.csv contents.
std::string ReportJson(const AnalysisReport& report);
std::string LmgCsv(const AnalysisReport& report);

}  // namespace ctxread

#endif  // CTXREAD_ANALYSIS_H_
