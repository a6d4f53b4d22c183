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

#include "ctxread/config.h"

#include <algorithm>
#include <map>

#include "ctxread/error.h"
#include "ctxread/io.h"

namespace ctxread {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Bad(std::string_view key, std::string_view value,
                      const std::string& expect) {
  throw ConfigError("setting '" + std::string(key) + "' = '" +
                    std::string(value) + "': expected " + expect);
}

double Real(std::string_view key, std::string_view v) {
  double out = 0.0;
  if (!ParseDouble(v, &out)) Bad(key, v, "a finite number");
  return out;
}

std::size_t Count(std::string_view key, std::string_view v) {
  long long out = 0;
  if (!ParseInt(v, &out) || out < 0) Bad(key, v, "a non-negative integer");
  return static_cast<std::size_t>(out);
}

bool Bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  Bad(key, v, "true or false");
}

}  // namespace

void SetSeed(RunConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.analysis.seed = seed;
  c.synthetic.seed = seed;
}

void ApplySetting(RunConfig& c, std::string_view key, std::string_view value) {
  const std::string_view v = Trim(value);
  if (key == "lm") {
    c.lm = v;
  } else if (key == "predictors_file") {
    c.predictors_file = v;
  } else if (key == "corpus") {
    c.corpus = v;
  } else if (key == "out") {
    c.out = v;
  } else if (key == "seed") {
    long long s = 0;
    if (!ParseInt(v, &s) || s < 0) Bad(key, v, "a non-negative integer");
    SetSeed(c, static_cast<std::uint64_t>(s));
  } else if (key == "folds") {
    c.analysis.folds = Count(key, v);
  } else if (key == "predictors") {
    std::vector<ModelKind> models;
    std::size_t start = 0;
    while (start <= v.size()) {
      auto end = v.find(',', start);
      if (end == std::string_view::npos) end = v.size();
      const auto item = Trim(v.substr(start, end - start));
      if (item == "surprisal") {
        models.push_back(ModelKind::kSurprisal);
      } else if (item == "pmi") {
        models.push_back(ModelKind::kPmi);
      } else if (item == "ortho") {
        models.push_back(ModelKind::kOrtho);
      } else {
        Bad(key, v, "a list of surprisal, pmi, ortho");
      }
      start = end + 1;
    }
    std::sort(models.begin(), models.end());
    models.erase(std::unique(models.begin(), models.end()), models.end());
    c.analysis.models = models;
  } else if (key == "length") {
    c.analysis.include_length = Bool(key, v);
  } else if (key == "no_length") {
    c.analysis.include_length = !Bool(key, v);
  } else if (key == "swap_ortho") {
    if (v == "frequency") {
      c.analysis.swap_frequency = true;
    } else if (v == "none" || v.empty()) {
      c.analysis.swap_frequency = false;
    } else {
      Bad(key, v, "frequency or none");
    }
  } else if (key == "smooth") {
    c.analysis.smooth = Bool(key, v);
  } else if (key == "lmg_grouping") {
    if (v == "paired") {
      c.analysis.grouping = LmgGrouping::kPaired;
    } else if (v == "separate") {
      c.analysis.grouping = LmgGrouping::kSeparate;
    } else {
      Bad(key, v, "paired or separate");
    }
  } else if (key == "fold_unit") {
    if (v == "token") {
      c.analysis.fold_unit = FoldUnit::kToken;
    } else if (v == "document") {
      c.analysis.fold_unit = FoldUnit::kDocument;
    } else {
      Bad(key, v, "token or document");
    }
  } else if (key == "ortho_stats") {
    if (v == "train") {
      c.analysis.projection_stats = ProjectionStats::kTrainingFold;
    } else if (v == "global") {
      c.analysis.projection_stats = ProjectionStats::kGlobal;
    } else {
      Bad(key, v, "train or global");
    }
  } else if (key == "smooth_k") {
    c.analysis.smooth_k = Count(key, v);
  } else if (key == "lambda_min" || key == "lambda_max" ||
             key == "lambda_count") {
    if (key == "lambda_min") c.lambda_min = Real(key, v);
    if (key == "lambda_max") c.lambda_max = Real(key, v);
    if (key == "lambda_count") c.lambda_count = Count(key, v);
    c.analysis.lambda_grid = LambdaGrid(c.lambda_min, c.lambda_max,
                                        c.lambda_count);
  } else if (key == "variance_floor") {
    c.analysis.variance_floor = Real(key, v);
  } else if (key == "max_len") {
    c.budget.max_len = Count(key, v);
  } else if (key == "tail_tol") {
    c.budget.tail_tol = Real(key, v);
  } else if (key == "kl_trials") {
    c.kl_trials = Count(key, v);
  } else if (key == "max_bad_fraction") {
    c.max_bad_fraction = Real(key, v);
  } else if (key == "n_docs") {
    c.synthetic.n_docs = Count(key, v);
  } else if (key == "doc_len") {
    c.synthetic.doc_len = Count(key, v);
  } else if (key == "noise_sd") {
    c.synthetic.noise_sd = Real(key, v);
  } else if (key == "participants") {
    c.synthetic.participants = Count(key, v);
  } else if (key == "skip_prob") {
    c.synthetic.skip_prob = Real(key, v);
  } else if (key.starts_with("coef.")) {
    const std::string name(key.substr(5));
    const auto& names = SyntheticCoefficientNames();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw ConfigError("unknown coefficient '" + name + "'");
    }
    c.synthetic.true_coeffs[name] = Real(key, v);
  } else {
    throw ConfigError("unknown setting '" + std::string(key) + "'");
  }
}

RunConfig ParseConfig(std::string_view text) {
  RunConfig c;
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(i + 1) +
                        " is not key = value");
    }
    try {
      ApplySetting(c, Trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(i + 1) + ": " +
                        e.what());
    }
  }
  return c;
}

RunConfig LoadConfig(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return ParseConfig(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string CanonicalConfig(const RunConfig& c) {
  const auto& a = c.analysis;
  std::map<std::string, std::string> kv;
  kv["lm"] = c.lm;
  kv["predictors_file"] = c.predictors_file;
  kv["corpus"] = c.corpus;
  kv["seed"] = std::to_string(c.seed);
  kv["folds"] = std::to_string(a.folds);
  std::string models;
  for (ModelKind m : a.models) {
    if (!models.empty()) models += ",";
    models += m == ModelKind::kSurprisal ? "surprisal"
              : m == ModelKind::kPmi     ? "pmi"
                                         : "ortho";
  }
  kv["predictors"] = models;
  kv["length"] = a.include_length ? "true" : "false";
  kv["swap_ortho"] = a.swap_frequency ? "frequency" : "none";
  kv["smooth"] = a.smooth ? "true" : "false";
  kv["lmg_grouping"] = a.grouping == LmgGrouping::kPaired ? "paired" : "separate";
  kv["fold_unit"] = a.fold_unit == FoldUnit::kToken ? "token" : "document";
  kv["ortho_stats"] =
      a.projection_stats == ProjectionStats::kTrainingFold ? "train" : "global";
  kv["smooth_k"] = std::to_string(a.smooth_k);
  std::string grid;
  for (double l : a.lambda_grid) {
    if (!grid.empty()) grid += ",";
    grid += FormatDouble(l);
  }
  kv["lambda_grid"] = grid;
  kv["variance_floor"] = FormatDouble(a.variance_floor);
  kv["max_len"] = std::to_string(c.budget.max_len);
  kv["tail_tol"] = FormatDouble(c.budget.tail_tol);
  kv["kl_trials"] = std::to_string(c.kl_trials);
  kv["max_bad_fraction"] = FormatDouble(c.max_bad_fraction);
  kv["n_docs"] = std::to_string(c.synthetic.n_docs);
  kv["doc_len"] = std::to_string(c.synthetic.doc_len);
  kv["noise_sd"] = FormatDouble(c.synthetic.noise_sd);
  kv["participants"] = std::to_string(c.synthetic.participants);
  kv["skip_prob"] = FormatDouble(c.synthetic.skip_prob);
  for (const auto& [name, value] : c.synthetic.true_coeffs) {
    kv["coef." + name] = FormatDouble(value);
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

void ValidateForAnalysis(const RunConfig& c) {
  if (c.lm.empty() == c.predictors_file.empty()) {
    throw ConfigError("set exactly one predictor source: lm or predictors_file");
  }
  if (c.corpus.empty()) throw ConfigError("no corpus given");
  if (c.analysis.folds < 2) throw ConfigError("folds must be at least 2");
  if (c.analysis.smooth_k < 3) throw ConfigError("smooth_k must be at least 3");
  if (c.analysis.models.empty()) throw ConfigError("no models selected");
  if (!(c.analysis.variance_floor > 0.0)) {
    throw ConfigError("variance_floor must be positive");
  }
  c.budget.Validate();
}

}  // namespace ctxread
