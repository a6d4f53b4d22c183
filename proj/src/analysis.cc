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

#include "ctxread/analysis.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "ctxread/error.h"
#include "ctxread/hilbert.h"
#include "ctxread/io.h"
#include "ctxread/numeric.h"
#include "ctxread/random.h"
#include "json.hpp"

namespace ctxread {
namespace {

using ColumnMap = std::map<std::string, std::vector<double>>;
using Json = nlohmann::ordered_json;

const std::vector<std::string> kRawNames = {"surprisal", "frequency", "pmi",
                                            "length"};

struct Rows {
  std::vector<std::string> docs;
  std::vector<double> y;
  ColumnMap raw;  // current and prev_ copies
};

Rows CollectRows(std::span<const PredictorRecord> table) {
  Rows rows;
  for (const auto& r : table) {
    if (!r.prev || !r.rt_ms) continue;
    rows.docs.push_back(r.doc_id);
    rows.y.push_back(*r.rt_ms);
    const PredictorValues* v[2] = {&r.current, &*r.prev};
    for (int lag = 0; lag < 2; ++lag) {
      const std::string pre = lag ? "prev_" : "";
      rows.raw[pre + "surprisal"].push_back(v[lag]->surprisal);
      rows.raw[pre + "frequency"].push_back(v[lag]->frequency);
      rows.raw[pre + "pmi"].push_back(v[lag]->pmi);
      rows.raw[pre + "length"].push_back(v[lag]->length);
    }
  }
  return rows;
}

// Base predictor names of a linear model; each enters with its prev_ copy.
std::vector<std::string> ModelBases(ModelKind kind,
                                    const AnalysisOptions& o) {
  std::vector<std::string> bases;
  switch (kind) {
    case ModelKind::kSurprisal:
      bases = {"surprisal", "frequency", "length"};
      break;
    case ModelKind::kPmi:
      bases = {"pmi", "frequency", "length"};
      break;
    case ModelKind::kOrtho:
      bases = o.swap_frequency
                  ? std::vector<std::string>{"surprisal", "ortho_frequency",
                                             "ortho_length"}
                  : std::vector<std::string>{"ortho_surprisal", "frequency",
                                             "ortho_length"};
      break;
  }
  if (!o.include_length) bases.pop_back();
  return bases;
}

struct Residualized {
  std::string name;     // new base name
  std::string x;        // residualized base
  std::string against;  // base it is residualized on
};

std::vector<Residualized> ResidualizedBases(const AnalysisOptions& o) {
  std::vector<Residualized> out = {
      {"ortho_surprisal", "surprisal", "frequency"}};
  if (o.swap_frequency) out.push_back({"ortho_frequency", "frequency", "surprisal"});
  if (o.include_length) out.push_back({"ortho_length", "length", "frequency"});
  return out;
}

// Adds residualized columns (and their prev_ copies) with the projection
// fitted on `fit_rows`.
void AddResidualized(ColumnMap& cols, const AnalysisOptions& o,
                     std::span<const std::size_t> fit_rows) {
  for (const auto& r : ResidualizedBases(o)) {
    for (const std::string pre : {"", "prev_"}) {
      const auto& x = cols.at(pre + r.x);
      const auto& z = cols.at(pre + r.against);
      const auto coef = FitProjection(Gather(x, fit_rows), Gather(z, fit_rows));
      cols[pre + r.name] = ApplyProjection(coef, x, z);
    }
  }
}

std::vector<Column> ModelColumns(const std::vector<std::string>& bases,
                                 const ColumnMap& cols, LmgGrouping grouping) {
  std::vector<Column> out;
  for (const auto& b : bases) {
    for (const std::string pre : {"", "prev_"}) {
      const std::string name = pre + b;
      out.push_back({name, cols.at(name),
                     grouping == LmgGrouping::kPaired ? b : name});
    }
  }
  return out;
}

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

struct FoldData {
  std::vector<std::size_t> train, test;
  ColumnMap cols;  // standardized plus residualized, all rows
  std::vector<double> y_train, y_test;
  std::vector<double> base_ll;  // training-mean model on the test rows
};

struct LinearScore {
  FitResult fit;
  double test_r2 = 0.0;
  double test_llh = 0.0;
  double delta_llh = 0.0;
};

LinearScore ScoreLinear(const std::vector<Column>& columns, const FoldData& fd,
                        double floor) {
  const DesignMatrix x(columns);
  const DesignMatrix x_train = x.RowSubset(fd.train);
  const DesignMatrix x_test = x.RowSubset(fd.test);
  LinearScore s;
  s.fit = OlsFit(x_train, fd.y_train);
  s.test_r2 = RSquared(s.fit, x_test, fd.y_test);
  const auto ll = GaussianLoglik(s.fit, x_test, fd.y_test, floor);
  s.test_llh = Mean(ll);
  s.delta_llh = DeltaLlh(ll, fd.base_ll);
  return s;
}

Json MeanSe(const MeanAndError& m) {
  Json j;
  j["mean"] = m.mean;
  j["se"] = m.se;
  return j;
}

Json LmgJson(const LmgReport& r) {
  Json j;
  j["groups"] = r.groups;
  j["shares"] = r.shares;
  j["raw_shares"] = r.raw_shares;
  j["total_r2"] = r.total_r2;
  return j;
}

}  // namespace

std::string ModelName(ModelKind kind, bool swap_frequency) {
  switch (kind) {
    case ModelKind::kSurprisal:
      return "surprisal";
    case ModelKind::kPmi:
      return "pmi";
    case ModelKind::kOrtho:
      return swap_frequency ? "ortho_frequency" : "ortho_surprisal";
  }
  return "";
}

AnalysisReport RunAnalysis(std::span<const PredictorRecord> table,
                           const AnalysisOptions& o) {
  if (o.folds < 2) throw ConfigError("need at least 2 folds");
  if (o.models.empty()) throw ConfigError("no models requested");
  const Rows rows = CollectRows(table);
  const std::size_t n = rows.y.size();
  if (n < 3 * o.folds) {
    throw SizeError("only " + std::to_string(n) +
                    " usable rows for " + std::to_string(o.folds) + " folds");
  }
  AnalysisReport rep;
  rep.rows = n;
  rep.folds = o.folds;

  // Exact identities on the raw columns of all rows.
  {
    std::vector<PredictorTriple> triples;
    for (const std::string pre : {"", "prev_"}) {
      triples.push_back({pre, rows.raw.at(pre + "surprisal"),
                         rows.raw.at(pre + "frequency"),
                         rows.raw.at(pre + "pmi")});
    }
    std::vector<Column> covariates;
    if (o.include_length) {
      covariates.push_back({"length", rows.raw.at("length"), ""});
      covariates.push_back({"prev_length", rows.raw.at("prev_length"), ""});
    }
    rep.equivalence = EquivalenceCheck(triples, covariates, rows.y);
  }

  const std::uint64_t fold_seed =
      Rng::Substream(o.seed, "folds").NextU64();
  const FoldAssignment folds = o.fold_unit == FoldUnit::kDocument
                                   ? GroupKFold(rows.docs, o.folds, fold_seed)
                                   : KFold(n, o.folds, fold_seed);

  for (ModelKind kind : o.models) {
    ModelReport m;
    m.name = ModelName(kind, o.swap_frequency);
    rep.models.push_back(std::move(m));
  }
  std::vector<std::string> single_groups = {"surprisal", "pmi",
                                            "ortho_surprisal", "frequency"};
  if (o.swap_frequency) single_groups.push_back("ortho_frequency");
  if (o.include_length) {
    single_groups.push_back("length");
    single_groups.push_back("ortho_length");
  }
  std::vector<std::vector<double>> single_deltas(single_groups.size());

  struct SmoothSpec {
    std::string name;
    std::vector<std::string> bases;
  };
  const std::vector<SmoothSpec> smooth_specs = {
      {"s(surprisal)", {"surprisal"}},
      {"s(pmi)", {"pmi"}},
      {"s(ortho_surprisal)", {"ortho_surprisal"}},
      {"s(frequency)", {"frequency"}},
      {"s(surprisal)+s(frequency)", {"surprisal", "frequency"}},
      {"s(pmi)+s(frequency)", {"pmi", "frequency"}},
      {"s(ortho_surprisal)+s(frequency)", {"ortho_surprisal", "frequency"}}};
  if (o.smooth) {
    for (const auto& spec : smooth_specs) {
      SmoothModelReport s;
      s.name = spec.name;
      for (const auto& b : spec.bases) {
        s.terms.push_back(b);
        s.terms.push_back("prev_" + b);
      }
      s.k = o.smooth_k;
      rep.smooth.push_back(std::move(s));
    }
  }

  std::map<std::string, double> max_corr;
  for (std::size_t f = 0; f < o.folds; ++f) {
    FoldData fd;
    fd.train = folds.TrainRows(f);
    fd.test = folds.TestRows(f);
    fd.y_train = Gather(rows.y, fd.train);
    fd.y_test = Gather(rows.y, fd.test);
    for (const auto& [name, values] : rows.raw) {
      fd.cols[name] = FitStandardizer(Gather(values, fd.train)).Apply(values);
    }
    const auto all = AllRows(n);
    AddResidualized(fd.cols, o,
                    o.projection_stats == ProjectionStats::kGlobal
                        ? std::span<const std::size_t>(all)
                        : std::span<const std::size_t>(fd.train));
    for (const auto& r : ResidualizedBases(o)) {
      for (const std::string pre : {"", "prev_"}) {
        const double c = std::abs(
            Correlation(Gather(fd.cols.at(pre + r.name), fd.train),
                        Gather(fd.cols.at(pre + r.against), fd.train)));
        double& slot = max_corr[pre + r.name];
        slot = std::max(slot, c);
      }
    }
    const FitResult base =
        OlsFit(DesignMatrix::InterceptOnly(fd.train.size()), fd.y_train);
    fd.base_ll = GaussianLoglik(base, DesignMatrix::InterceptOnly(fd.test.size()),
                                fd.y_test, o.variance_floor);

    double r2_min = 0.0, r2_max = 0.0;
    for (std::size_t mi = 0; mi < o.models.size(); ++mi) {
      const auto cols =
          ModelColumns(ModelBases(o.models[mi], o), fd.cols, o.grouping);
      const LinearScore s = ScoreLinear(cols, fd, o.variance_floor);
      ModelFold mf;
      mf.fold = f;
      mf.train_r2 = s.fit.r2;
      mf.test_r2 = s.test_r2;
      mf.labels = s.fit.labels;
      mf.coefficients.assign(s.fit.coefficients.data(),
                             s.fit.coefficients.data() +
                                 s.fit.coefficients.size());
      mf.test_llh = s.test_llh;
      mf.delta_llh = s.delta_llh;
      if (o.lmg) {
        mf.lmg = Lmg(DesignMatrix(cols).RowSubset(fd.train), fd.y_train);
      }
      if (mi == 0) r2_min = r2_max = mf.train_r2;
      r2_min = std::min(r2_min, mf.train_r2);
      r2_max = std::max(r2_max, mf.train_r2);
      rep.models[mi].folds.push_back(std::move(mf));
    }
    rep.max_r2_spread = std::max(rep.max_r2_spread, r2_max - r2_min);

    for (std::size_t g = 0; g < single_groups.size(); ++g) {
      const auto cols =
          ModelColumns({single_groups[g]}, fd.cols, LmgGrouping::kPaired);
      single_deltas[g].push_back(
          ScoreLinear(cols, fd, o.variance_floor).delta_llh);
    }

    if (o.smooth) {
      for (auto& s : rep.smooth) {
        std::vector<SmoothTerm> train_terms;
        std::vector<std::vector<double>> test_cols;
        for (const auto& t : s.terms) {
          train_terms.push_back({t, Gather(fd.cols.at(t), fd.train), o.smooth_k});
          test_cols.push_back(Gather(fd.cols.at(t), fd.test));
        }
        s.cv.folds.push_back(EvaluateSmoothFold(f, train_terms, test_cols,
                                                fd.y_train, fd.y_test,
                                                o.lambda_grid, o.variance_floor));
      }
    }
  }

  if (o.models.size() > 1 && rep.max_r2_spread > 1e-10) {
    throw IdentityError("training R2 differs across models by " +
                        FormatDouble(rep.max_r2_spread));
  }

  for (const auto& [name, c] : max_corr) {
    rep.ortho.names.push_back(name);
    rep.ortho.max_abs_corr.push_back(c);
  }
  for (std::size_t g = 0; g < single_groups.size(); ++g) {
    rep.predictor_delta_llh.push_back(
        {single_groups[g], Summarize(single_deltas[g])});
  }
  for (auto& s : rep.smooth) {
    std::vector<double> d;
    for (const auto& f : s.cv.folds) d.push_back(f.delta_llh);
    s.cv.delta_llh = Summarize(d);
  }

  // Raw-unit fits on all rows for coefficient interpretation.
  ColumnMap raw = rows.raw;
  const auto all = AllRows(n);
  AddResidualized(raw, o, all);
  for (std::size_t mi = 0; mi < o.models.size(); ++mi) {
    auto& m = rep.models[mi];
    const auto cols = ModelColumns(ModelBases(o.models[mi], o), raw, o.grouping);
    m.full_fit = OlsFit(DesignMatrix(cols), rows.y);
    std::vector<double> deltas, r2s;
    for (const auto& f : m.folds) {
      deltas.push_back(f.delta_llh);
      r2s.push_back(f.train_r2);
    }
    m.delta_llh = Summarize(deltas);
    m.mean_total_r2 = Mean(r2s);
    if (o.lmg) {
      m.groups = m.folds.front().lmg->groups;
      m.mean_shares.assign(m.groups.size(), 0.0);
      for (std::size_t g = 0; g < m.groups.size(); ++g) {
        std::vector<double> s;
        for (const auto& f : m.folds) s.push_back(f.lmg->shares[g]);
        m.mean_shares[g] = Mean(s);
      }
    }
  }
  return rep;
}

std::string ReportJson(const AnalysisReport& rep) {
  Json j;
  j["rows"] = rep.rows;
  j["folds"] = rep.folds;
  j["models"] = Json::array();
  for (const auto& m : rep.models) {
    Json jm;
    jm["model"] = m.name;
    jm["kind"] = "linear";
    jm["folds"] = Json::array();
    for (const auto& f : m.folds) {
      Json jf;
      jf["fold"] = f.fold;
      jf["r2"] = f.train_r2;
      jf["test_r2"] = f.test_r2;
      Json coeffs = Json::object();
      for (std::size_t i = 0; i < f.labels.size(); ++i) {
        coeffs[f.labels[i]] = f.coefficients[i];
      }
      jf["coeffs"] = coeffs;
      jf["llh"] = f.test_llh;
      jf["delta_llh"] = f.delta_llh;
      if (f.lmg) jf["lmg"] = LmgJson(*f.lmg);
      jm["folds"].push_back(jf);
    }
    if (!m.groups.empty()) {
      Json jl;
      jl["groups"] = m.groups;
      jl["shares"] = m.mean_shares;
      jl["total_r2"] = m.mean_total_r2;
      jl["orderings"] = m.folds.front().lmg->orderings;
      jm["lmg"] = jl;
    }
    jm["delta_llh"] = MeanSe(m.delta_llh);
    Json ff;
    Json coeffs = Json::object(), ses = Json::object();
    for (std::size_t i = 0; i < m.full_fit.labels.size(); ++i) {
      coeffs[m.full_fit.labels[i]] = m.full_fit.coefficients(i);
      ses[m.full_fit.labels[i]] = m.full_fit.std_errors(i);
    }
    ff["coeffs"] = coeffs;
    ff["std_errors"] = ses;
    ff["r2"] = m.full_fit.r2;
    ff["residual_variance"] = m.full_fit.residual_variance;
    ff["n"] = m.full_fit.n;
    jm["full_fit"] = ff;
    j["models"].push_back(jm);
  }

  Json eq;
  eq["passed"] = rep.equivalence.passed;
  eq["r2_surprisal"] = rep.equivalence.r2_surprisal;
  eq["r2_pmi"] = rep.equivalence.r2_pmi;
  eq["r2_delta"] = rep.equivalence.r2_delta;
  eq["max_prediction_delta"] = rep.equivalence.max_prediction_delta;
  eq["triples"] = Json::array();
  for (const auto& t : rep.equivalence.triples) {
    Json jt;
    jt["name"] = t.name.empty() ? "current" : "prev";
    jt["beta_surprisal"] = t.beta_surprisal;
    jt["beta_pmi"] = t.beta_pmi;
    jt["beta_frequency_surprisal_model"] = t.beta_frequency_surprisal_model;
    jt["beta_frequency_pmi_model"] = t.beta_frequency_pmi_model;
    jt["pmi_delta"] = t.pmi_delta;
    jt["frequency_shift_delta"] = t.frequency_shift_delta;
    eq["triples"].push_back(jt);
  }
  j["equivalence"] = eq;
  j["r2_max_spread"] = rep.max_r2_spread;

  Json od = Json::object();
  for (std::size_t i = 0; i < rep.ortho.names.size(); ++i) {
    od[rep.ortho.names[i]] = rep.ortho.max_abs_corr[i];
  }
  j["ortho_diagnostics"] = od;

  j["predictor_delta_llh"] = Json::array();
  for (const auto& g : rep.predictor_delta_llh) {
    Json jg = MeanSe(g.delta_llh);
    jg["group"] = g.group;
    j["predictor_delta_llh"].push_back(jg);
  }

  j["smooth"] = Json::array();
  for (const auto& s : rep.smooth) {
    Json js;
    js["model"] = s.name;
    js["kind"] = "smooth";
    js["folds"] = Json::array();
    for (const auto& f : s.cv.folds) {
      Json jf;
      jf["fold"] = f.fold;
      jf["r2"] = f.train_r2;
      jf["llh"] = f.test_llh;
      jf["delta_llh"] = f.delta_llh;
      jf["terms"] = Json::array();
      for (std::size_t t = 0; t < s.terms.size(); ++t) {
        Json jt;
        jt["name"] = s.terms[t];
        jt["k"] = s.k;
        jt["lambda"] = f.lambdas[t];
        jt["edf"] = f.edfs[t];
        jf["terms"].push_back(jt);
      }
      js["folds"].push_back(jf);
    }
    js["delta_llh"] = MeanSe(s.cv.delta_llh);
    j["smooth"].push_back(js);
  }
  return j.dump(2) + "\n";
}

std::string LmgCsv(const AnalysisReport& rep) {
  std::string out = "model,group,fold,share,r2\n";
  for (const auto& m : rep.models) {
    for (const auto& f : m.folds) {
      if (!f.lmg) continue;
      for (std::size_t g = 0; g < f.lmg->groups.size(); ++g) {
        out += m.name + "," + f.lmg->groups[g] + "," + std::to_string(f.fold) +
               "," + FormatDouble(f.lmg->shares[g]) + "," +
               FormatDouble(f.lmg->total_r2) + "\n";
      }
    }
  }
  return out;
}

}  // namespace ctxread
