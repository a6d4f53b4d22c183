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

// ctxread: gen | analyze | oracle | report | make-lm
//
// Exit codes: 0 success, 2 configuration or I/O, 3 identity violation,
// 4 coverage, 5 numerical failure.

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctxread/analysis.h"
#include "ctxread/config.h"
#include "ctxread/corpus.h"
#include "ctxread/error.h"
#include "ctxread/io.h"
#include "ctxread/lm_io.h"
#include "ctxread/oracle.h"
#include "ctxread/predictors.h"
#include "ctxread/synthetic.h"
#include "json.hpp"

namespace ctxread {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw ConfigError("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

// Settings shared by every command that reads a config file.
struct CommonFlags {
  std::string config;
  std::optional<long long> seed;
  std::string out;
  std::string lm;
  std::vector<std::string> sets;
};

void AddCommon(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key=value configuration file");
  cmd->add_option("--seed", f.seed, "64-bit seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--lm", f.lm, "LM definition file");
  cmd->add_option("--set", f.sets, "override a setting, KEY=VALUE");
}

RunConfig Resolve(const CommonFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : LoadConfig(f.config);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects KEY=VALUE, got '" + s + "'");
    }
    ApplySetting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) {
    if (*f.seed < 0) throw ConfigError("seed must be non-negative");
    SetSeed(c, static_cast<std::uint64_t>(*f.seed));
  }
  if (!f.out.empty()) c.out = f.out;
  if (!f.lm.empty()) c.lm = f.lm;
  return c;
}

fs::path RequireOut(const RunConfig& c) {
  if (c.out.empty()) throw ConfigError("no output directory (set out or --out)");
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + c.out +
                      "': " + ec.message());
  }
  return fs::path(c.out);
}

void WriteManifest(const fs::path& dir, const std::string& command,
                   const RunConfig& c,
                   const std::vector<std::pair<std::string, std::string>>& inputs,
                   const std::vector<std::pair<std::string, std::string>>& outputs) {
  Json m;
  m["command"] = command;
  const std::string canonical = CanonicalConfig(c);
  m["config_hash"] = Sha256Hex(canonical);
  m["seed"] = c.seed;
  Json cfg = Json::object();
  for (auto line : SplitLines(canonical)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    cfg[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  m["config"] = cfg;
  m["inputs"] = Json::object();
  for (const auto& [label, path] : inputs) {
    Json in;
    in["path"] = path;
    in["sha256"] = Sha256Hex(ReadFile(path));
    m["inputs"][label] = in;
  }
  m["outputs"] = Json::object();
  for (const auto& [name, contents] : outputs) {
    m["outputs"][name] = Sha256Hex(contents);
  }
  WriteFileAtomic((dir / "manifest.json").string(), m.dump(2) + "\n");
}

int CmdGen(const CommonFlags& flags) {
  RunConfig c = Resolve(flags);
  if (c.lm.empty()) throw ConfigError("gen needs an LM file (set lm or --lm)");
  const AutoregressiveLM lm = ReadLmTsv(c.lm);
  const fs::path dir = RequireOut(c);
  const SyntheticCorpus syn = GenerateSynthetic(lm, c.synthetic);
  const std::string corpus = FormatCorpus(syn.observations);
  WriteFileAtomic((dir / "corpus.tsv").string(), corpus);
  WriteFileAtomic((dir / "truth.json").string(), syn.sidecar);
  WriteManifest(dir, "gen", c, {{"lm", c.lm}},
                {{"corpus.tsv", corpus}, {"truth.json", syn.sidecar}});
  std::cout << "wrote " << syn.observations.size() << " observations over "
            << syn.table.size() << " tokens to " << dir.string() << "\n";
  return 0;
}

struct AnalyzeFlags {
  std::string predictors;
  bool no_length = false;
  std::string swap_ortho;
  bool smooth = false;
  std::string lmg_grouping;
  std::optional<std::size_t> folds;
  std::string corpus;
  std::string predictors_file;
  std::string fold_unit;
  std::string ortho_stats;
};

int CmdAnalyze(const CommonFlags& flags, const AnalyzeFlags& a) {
  RunConfig c = Resolve(flags);
  if (!a.predictors.empty()) ApplySetting(c, "predictors", a.predictors);
  if (a.no_length) ApplySetting(c, "no_length", "true");
  if (!a.swap_ortho.empty()) ApplySetting(c, "swap_ortho", a.swap_ortho);
  if (a.smooth) ApplySetting(c, "smooth", "true");
  if (!a.lmg_grouping.empty()) ApplySetting(c, "lmg_grouping", a.lmg_grouping);
  if (a.folds) c.analysis.folds = *a.folds;
  if (!a.corpus.empty()) c.corpus = a.corpus;
  if (!a.predictors_file.empty()) c.predictors_file = a.predictors_file;
  if (!a.fold_unit.empty()) ApplySetting(c, "fold_unit", a.fold_unit);
  if (!a.ortho_stats.empty()) ApplySetting(c, "ortho_stats", a.ortho_stats);
  ValidateForAnalysis(c);
  const fs::path dir = RequireOut(c);

  const ParsedCorpus parsed = ReadCorpus(c.corpus, c.max_bad_fraction);
  for (const auto& issue : parsed.issues) {
    std::cerr << c.corpus << ":" << issue.line << ": " << issue.message << "\n";
  }
  const auto tokens = CorpusTokens(parsed.observations);
  std::vector<PredictorRecord> table;
  std::vector<std::pair<std::string, std::string>> inputs = {
      {"corpus", c.corpus}};
  if (!c.lm.empty()) {
    const AutoregressiveLM lm = ReadLmTsv(c.lm);
    table = BuildPredictorTable(lm, UnigramMinimizer(lm), tokens);
    inputs.push_back({"lm", c.lm});
  } else {
    table = BuildPredictorTable(ReadExternalPredictors(c.predictors_file), tokens);
    inputs.push_back({"predictors_file", c.predictors_file});
  }

  const AnalysisReport rep = RunAnalysis(table, c.analysis);
  const std::string report = ReportJson(rep);
  const std::string lmg = LmgCsv(rep);
  const std::string predictors = FormatPredictorTable(table);
  WriteFileAtomic((dir / "report.json").string(), report);
  WriteFileAtomic((dir / "lmg.csv").string(), lmg);
  WriteFileAtomic((dir / "predictors.tsv").string(), predictors);
  WriteManifest(dir, "analyze", c, inputs,
                {{"report.json", report},
                 {"lmg.csv", lmg},
                 {"predictors.tsv", predictors}});

  std::cout << rep.rows << " rows, " << rep.folds << " folds\n";
  for (const auto& m : rep.models) {
    std::cout << m.name << ": mean R2 " << FormatDouble(m.mean_total_r2)
              << ", delta llh " << FormatDouble(m.delta_llh.mean) << " (se "
              << FormatDouble(m.delta_llh.se) << ")\n";
    for (std::size_t g = 0; g < m.groups.size(); ++g) {
      std::cout << "  " << m.groups[g] << " " << FormatDouble(m.mean_shares[g])
                << "\n";
    }
  }
  std::cout << "equivalence: passed (R2 delta "
            << FormatDouble(rep.equivalence.r2_delta) << ")\n";
  return 0;
}

int CmdOracle(const CommonFlags& flags, std::optional<std::size_t> max_len,
              std::optional<double> tail_tol,
              std::optional<std::size_t> kl_trials) {
  RunConfig c = Resolve(flags);
  if (max_len) c.budget.max_len = *max_len;
  if (tail_tol) c.budget.tail_tol = *tail_tol;
  if (kl_trials) c.kl_trials = *kl_trials;
  if (c.lm.empty()) throw ConfigError("oracle needs an LM file (set lm or --lm)");
  if (!c.predictors_file.empty()) {
    throw ConfigError("oracle runs on an internal LM, not a predictor file");
  }
  const AutoregressiveLM lm = ReadLmTsv(c.lm);
  const OracleReport rep = RunOracle(lm, c.budget, c.kl_trials, c.seed);
  for (const auto& check : rep.checks) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name
              << " residual=" << FormatDouble(check.residual) << " "
              << check.detail << "\n";
  }
  const std::string json = rep.Json();
  std::cout << json;
  if (!c.out.empty()) {
    const fs::path dir = RequireOut(c);
    WriteFileAtomic((dir / "oracle.json").string(), json);
    WriteManifest(dir, "oracle", c, {{"lm", c.lm}}, {{"oracle.json", json}});
  }
  return rep.passed() ? 0 : ExitCode(ErrorKind::kNumerical);
}

int CmdReport(const std::string& out_dir) {
  if (out_dir.empty()) throw ConfigError("report needs --out DIR");
  const fs::path dir(out_dir);
  Json rep;
  try {
    rep = Json::parse(ReadFile((dir / "report.json").string()));
  } catch (const Json::parse_error& e) {
    throw FormatError((dir / "report.json").string() + ": " + e.what());
  }
  std::string csv = "model,group,mean_share,ci_low,ci_high,folds\n";
  std::cout << rep["rows"].get<std::size_t>() << " rows, "
            << rep["folds"].get<std::size_t>() << " folds\n";
  for (const auto& m : rep["models"]) {
    const std::string name = m["model"].get<std::string>();
    std::cout << name << "  delta llh "
              << FormatDouble(m["delta_llh"]["mean"].get<double>()) << " +- "
              << FormatDouble(m["delta_llh"]["se"].get<double>()) << "\n";
    if (!m.contains("lmg")) continue;
    const auto groups = m["lmg"]["groups"].get<std::vector<std::string>>();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::vector<double> shares;
      for (const auto& f : m["folds"]) {
        shares.push_back(f["lmg"]["shares"][g].get<double>());
      }
      const MeanAndError s = Summarize(shares);
      const double lo = s.mean - 1.96 * s.se, hi = s.mean + 1.96 * s.se;
      csv += name + "," + groups[g] + "," + FormatDouble(s.mean) + "," +
             FormatDouble(lo) + "," + FormatDouble(hi) + "," +
             std::to_string(shares.size()) + "\n";
      std::printf("  %-22s %.4f  [%.4f, %.4f]\n", groups[g].c_str(), s.mean,
                  lo, hi);
    }
    std::printf("  %-22s %.4f\n", "total R2",
                m["lmg"]["total_r2"].get<double>());
  }
  for (const auto& s : rep["smooth"]) {
    std::cout << s["model"].get<std::string>() << "  delta llh "
              << FormatDouble(s["delta_llh"]["mean"].get<double>()) << " +- "
              << FormatDouble(s["delta_llh"]["se"].get<double>()) << "\n";
  }
  WriteFileAtomic((dir / "lmg_summary.csv").string(), csv);
  return 0;
}

int CmdMakeLm(const std::string& out, const SyntheticLmOptions& options) {
  if (out.empty()) throw ConfigError("make-lm needs --out FILE");
  WriteFileAtomic(out, FormatLmTsv(MakeSyntheticBigramLM(options)));
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Contextual predictors of reading times"};
  app.require_subcommand(1);

  CommonFlags gen_flags, analyze_flags, oracle_flags;
  auto* gen = app.add_subcommand("gen", "generate a synthetic corpus");
  AddCommon(gen, gen_flags);

  auto* analyze = app.add_subcommand("analyze", "run the regression analysis");
  AddCommon(analyze, analyze_flags);
  AnalyzeFlags af;
  analyze->add_option("--predictors", af.predictors,
                      "models to fit: surprisal,pmi,ortho");
  analyze->add_flag("--no-length", af.no_length, "drop the length predictor");
  analyze->add_option("--swap-ortho", af.swap_ortho,
                      "residualize frequency instead of surprisal")
      ->check(CLI::IsMember({"frequency", "none"}));
  analyze->add_flag("--smooth", af.smooth, "also fit smooth models");
  analyze->add_option("--lmg-grouping", af.lmg_grouping)
      ->check(CLI::IsMember({"paired", "separate"}));
  analyze->add_option("--folds", af.folds, "number of folds");
  analyze->add_option("--corpus", af.corpus, "corpus TSV");
  analyze->add_option("--predictors-file", af.predictors_file,
                      "external predictor TSV");
  analyze->add_option("--fold-unit", af.fold_unit)
      ->check(CLI::IsMember({"token", "document"}));
  analyze->add_option("--ortho-stats", af.ortho_stats)
      ->check(CLI::IsMember({"train", "global"}));

  auto* oracle = app.add_subcommand("oracle", "exact-enumeration checks");
  AddCommon(oracle, oracle_flags);
  std::optional<std::size_t> max_len, kl_trials;
  std::optional<double> tail_tol;
  oracle->add_option("--max-len", max_len, "enumeration length budget");
  oracle->add_option("--tail-tol", tail_tol, "admissible unenumerated mass");
  oracle->add_option("--kl-trials", kl_trials, "random unigram perturbations");

  auto* report = app.add_subcommand("report", "summarize an analysis run");
  std::string report_dir;
  report->add_option("--out,dir", report_dir, "analysis output directory");

  auto* make_lm = app.add_subcommand("make-lm", "write a synthetic bigram LM");
  std::string lm_out;
  SyntheticLmOptions lm_opts;
  make_lm->add_option("--out", lm_out, "output file")->required();
  make_lm->add_option("--vocabulary", lm_opts.vocabulary);
  make_lm->add_option("--zipf", lm_opts.zipf_exponent);
  make_lm->add_option("--context-strength", lm_opts.context_strength);
  make_lm->add_option("--context-noise", lm_opts.context_noise);
  make_lm->add_option("--eos-prob", lm_opts.eos_prob);
  make_lm->add_option("--seed", lm_opts.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ExitCode(ErrorKind::kConfig);
  }

  try {
    if (*gen) return CmdGen(gen_flags);
    if (*analyze) return CmdAnalyze(analyze_flags, af);
    if (*oracle) return CmdOracle(oracle_flags, max_len, tail_tol, kl_trials);
    if (*report) return CmdReport(report_dir);
    if (*make_lm) return CmdMakeLm(lm_out, lm_opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode(ErrorKind::kConfig);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace ctxread

int main(int argc, char** argv) { return ctxread::Main(argc, argv); }
