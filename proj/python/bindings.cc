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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "ctxread/analysis.h"
#include "ctxread/corpus.h"
#include "ctxread/error.h"
#include "ctxread/lm.h"
#include "ctxread/lm_io.h"
#include "ctxread/lmg.h"
#include "ctxread/predictors.h"
#include "ctxread/regression.h"
#include "ctxread/smooth.h"
#include "ctxread/synthetic.h"

namespace py = pybind11;

namespace ctxread {
namespace {

std::vector<double> ToVector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

// Python dicts keep insertion order, so column order is the caller's.
std::vector<Column> Columns(const py::dict& columns,
                            const std::optional<py::dict>& groups) {
  std::vector<Column> out;
  for (const auto& [key, value] : columns) {
    Column c{py::cast<std::string>(key), py::cast<std::vector<double>>(value),
             ""};
    if (groups && groups->contains(key)) {
      c.group = py::cast<std::string>((*groups)[key]);
    }
    out.push_back(std::move(c));
  }
  return out;
}

py::dict UnigramDict(const UnigramLM& q) {
  py::dict d;
  const auto& a = q.alphabet();
  for (std::size_t i = 0; i < a.symbol_count(); ++i) {
    d[py::str(a.Name(Symbol(i)))] = q.Probs()[i];
  }
  return d;
}

py::dict FitDict(const FitResult& fit) {
  py::dict d;
  d["labels"] = fit.labels;
  d["coefficients"] = ToVector(fit.coefficients);
  d["std_errors"] = ToVector(fit.std_errors);
  d["r2"] = fit.r2;
  d["residual_variance"] = fit.residual_variance;
  d["n"] = fit.n;
  return d;
}

py::dict Ols(const py::dict& columns, const std::vector<double>& y) {
  return FitDict(OlsFit(DesignMatrix(Columns(columns, std::nullopt)), y));
}

py::dict LmgShares(const py::dict& columns, const std::vector<double>& y,
                   const std::optional<py::dict>& groups) {
  const auto rep = Lmg(DesignMatrix(Columns(columns, groups)), y);
  py::dict d;
  d["groups"] = rep.groups;
  d["shares"] = rep.shares;
  d["total_r2"] = rep.total_r2;
  return d;
}

py::dict Smooth(const py::dict& columns, const std::vector<double>& y,
                std::size_t k, std::optional<std::vector<double>> grid) {
  std::vector<SmoothTerm> terms;
  for (auto& c : Columns(columns, std::nullopt)) {
    terms.push_back({c.name, std::move(c.values), k});
  }
  const auto fit = FitSmooth(y, terms, grid ? *grid : LambdaGrid());
  py::dict lambdas;
  for (const auto& t : fit.terms) lambdas[py::str(t.name)] = t.lambda;
  py::dict d;
  d["intercept"] = fit.intercept;
  d["lambdas"] = lambdas;
  d["gcv"] = fit.gcv;
  d["edf"] = fit.edf;
  d["r2"] = fit.r2;
  d["fitted"] = fit.fitted;
  return d;
}

py::dict Synthetic(const AutoregressiveLM& lm,
                   const std::map<std::string, double>& coefficients,
                   double noise_sd, std::size_t n_docs, std::size_t doc_len,
                   std::uint64_t seed, std::size_t participants,
                   double skip_prob) {
  SyntheticOptions opt;
  opt.true_coeffs = coefficients;
  opt.noise_sd = noise_sd;
  opt.n_docs = n_docs;
  opt.doc_len = doc_len;
  opt.seed = seed;
  opt.participants = participants;
  opt.skip_prob = skip_prob;
  const auto corpus = GenerateSynthetic(lm, opt);
  py::dict d;
  d["corpus"] = FormatCorpus(corpus.observations);
  d["sidecar"] = corpus.sidecar;
  return d;
}

py::dict Analyze(const std::string& corpus_tsv, const AutoregressiveLM& lm,
                 std::size_t folds, std::uint64_t seed, bool include_length,
                 bool swap_frequency, bool smooth) {
  const auto parsed = ParseCorpus(corpus_tsv);
  const auto tokens = CorpusTokens(parsed.observations);
  const auto table = BuildPredictorTable(lm, UnigramMinimizer(lm), tokens);
  AnalysisOptions opt;
  opt.folds = folds;
  opt.seed = seed;
  opt.include_length = include_length;
  opt.swap_frequency = swap_frequency;
  opt.smooth = smooth;
  const auto rep = RunAnalysis(table, opt);
  py::dict d;
  d["report"] = ReportJson(rep);
  d["lmg_csv"] = LmgCsv(rep);
  return d;
}

}  // namespace
}  // namespace ctxread

PYBIND11_MODULE(_core, m) {
  using namespace ctxread;
  m.doc() = "Native core of ctxread.";

  static py::exception<Error> base(m, "Error");
  static py::exception<Error> config(m, "ConfigError", base.ptr());
  static py::exception<Error> format(m, "FormatError", base.ptr());
  static py::exception<Error> identity(m, "IdentityError", base.ptr());
  static py::exception<Error> coverage(m, "CoverageError", base.ptr());
  static py::exception<Error> numerical(m, "NumericalError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::kConfig: py::set_error(config, e.what()); break;
        case ErrorKind::kFormat: py::set_error(format, e.what()); break;
        case ErrorKind::kIdentity: py::set_error(identity, e.what()); break;
        case ErrorKind::kCoverage: py::set_error(coverage, e.what()); break;
        case ErrorKind::kNumerical: py::set_error(numerical, e.what()); break;
      }
    }
  });

  py::class_<AutoregressiveLM>(m, "LanguageModel")
      .def_static("from_tsv", [](const std::string& t) { return ParseLmTsv(t); })
      .def_static("read", &ReadLmTsv, py::arg("path"))
      .def_static(
          "synthetic_bigram",
          [](std::size_t vocabulary, double context_strength,
             double context_noise, double eos_prob, std::uint64_t seed) {
            SyntheticLmOptions o;
            o.vocabulary = vocabulary;
            o.context_strength = context_strength;
            o.context_noise = context_noise;
            o.eos_prob = eos_prob;
            o.seed = seed;
            return MakeSyntheticBigramLM(o);
          },
          py::arg("vocabulary") = 24, py::arg("context_strength") = 1.0,
          py::arg("context_noise") = 1.0, py::arg("eos_prob") = 0.08,
          py::arg("seed") = 1)
      .def("to_tsv", [](const AutoregressiveLM& lm) { return FormatLmTsv(lm); })
      .def_property_readonly(
          "units", [](const AutoregressiveLM& lm) { return lm.alphabet().units(); })
      .def_property_readonly("order", &AutoregressiveLM::order)
      .def(
          "conditional",
          [](const AutoregressiveLM& lm, const std::vector<std::string>& ctx,
             const std::string& unit) { return Conditional(lm, ctx, unit); },
          py::arg("context"), py::arg("unit"))
      .def(
          "surprisal",
          [](const AutoregressiveLM& lm, const std::vector<std::string>& ctx,
             const std::string& unit) { return Surprisal(lm, ctx, unit); },
          py::arg("context"), py::arg("unit"))
      .def("expected_length",
           [](const AutoregressiveLM& lm) { return ExpectedLength(lm); })
      .def("prefix_normalizer",
           [](const AutoregressiveLM& lm) { return PrefixNormalizer(lm); })
      .def("unigram_minimizer", [](const AutoregressiveLM& lm) {
        return UnigramDict(UnigramMinimizer(lm));
      });

  m.def("ols", &Ols, py::arg("columns"), py::arg("y"));
  m.def("lmg", &LmgShares, py::arg("columns"), py::arg("y"),
        py::arg("groups") = std::nullopt);
  m.def("fit_smooth", &Smooth, py::arg("columns"), py::arg("y"),
        py::arg("k") = 6, py::arg("lambda_grid") = std::nullopt);
  m.def("lambda_grid", &LambdaGrid, py::arg("lo") = 1e-4, py::arg("hi") = 1e4,
        py::arg("count") = 17);
  m.def("generate_synthetic", &Synthetic, py::arg("lm"),
        py::arg("coefficients"), py::arg("noise_sd") = 1.0,
        py::arg("n_docs") = 10, py::arg("doc_len") = 50, py::arg("seed") = 1,
        py::arg("participants") = 1, py::arg("skip_prob") = 0.0);
  m.def("analyze", &Analyze, py::arg("corpus_tsv"), py::arg("lm"),
        py::arg("folds") = 10, py::arg("seed") = 1,
        py::arg("include_length") = true, py::arg("swap_frequency") = false,
        py::arg("smooth") = false);
}
