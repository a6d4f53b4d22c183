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

#include "ctxread/predictors.h"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ctxread/error.h"
#include "ctxread/lm_io.h"
#include "oracles.h"

namespace ctxread {
namespace {

TEST(Surprisal, Examples) {
  const auto m1 = oracle::M1();
  const std::vector<std::string> none;
  EXPECT_NEAR(Surprisal(m1, none, "a"), -std::log(0.8), 1e-12);
  EXPECT_NEAR(Surprisal(m1, none, "a"), 0.22314, 1e-5);
  const auto m0 = oracle::M0();
  const std::vector<std::string> ctx = {"a", "b", "a"};
  EXPECT_NEAR(Surprisal(m0, ctx, "b"), 1.60944, 1e-5);
  const auto certain =
      ParseLmTsv("state\tunit\tprob\n^\ta\t1\n^\t$\t0\na\ta\t0\na\t$\t1\n");
  EXPECT_EQ(Surprisal(certain, none, "a"), 0.0);
  EXPECT_FALSE(std::signbit(Surprisal(certain, none, "a")));
}

TEST(Frequency, Examples) {
  const auto q1 = UnigramMinimizer(oracle::M1());
  EXPECT_NEAR(Frequency(q1, "a"), std::log(31.0 / 16.0), 1e-12);
  EXPECT_NEAR(Frequency(q1, "a"), 0.66139, 1e-5);
  const auto q0 = UnigramMinimizer(oracle::M0());
  EXPECT_NEAR(Frequency(q0, "$"), 0.69315, 1e-5);
  const UnigramLM sure(UnitAlphabet({"a"}), {1.0, 0.0});
  EXPECT_EQ(Frequency(sure, "a"), 0.0);
}

TEST(Pmi, Examples) {
  const auto m1 = oracle::M1();
  const auto q1 = UnigramMinimizer(m1);
  const std::vector<std::string> none;
  EXPECT_NEAR(Pmi(Surprisal(m1, none, "a"), Frequency(q1, "a")), 0.43825, 1e-5);
  EXPECT_EQ(Pmi(0.7, 0.7), 0.0);
  EXPECT_DOUBLE_EQ(Pmi(2.0, 0.5), -1.5);
}

std::vector<CorpusToken> Doc(const std::string& id,
                             const std::vector<std::string>& words) {
  std::vector<CorpusToken> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    out.push_back({id, static_cast<long long>(i + 1), words[i], 250.0});
  }
  return out;
}

TEST(BuildPredictorTable, SpilloverCopiesPreviousToken) {
  const auto lm = oracle::M1();
  const auto table =
      BuildPredictorTable(lm, UnigramMinimizer(lm), Doc("d1", {"a", "a", "a"}));
  ASSERT_EQ(table.size(), 3u);
  EXPECT_FALSE(table[0].prev.has_value());
  ASSERT_TRUE(table[1].prev.has_value());
  EXPECT_EQ(table[1].prev->surprisal, table[0].current.surprisal);
  EXPECT_EQ(table[1].prev->frequency, table[0].current.frequency);
  EXPECT_EQ(table[1].prev->length, table[0].current.length);
  EXPECT_NEAR(table[0].current.surprisal, -std::log(0.8), 1e-12);
  EXPECT_NEAR(table[1].current.surprisal, -std::log(0.25), 1e-12);
  for (const auto& r : table) {
    EXPECT_NEAR(r.current.pmi, r.current.frequency - r.current.surprisal, 1e-9);
    EXPECT_GE(r.current.length, 1.0);
  }
}

TEST(BuildPredictorTable, ContextResetsPerDocument) {
  const auto lm = oracle::M1();
  auto tokens = Doc("d1", {"a", "a"});
  for (auto& t : Doc("d2", {"a"})) tokens.push_back(t);
  const auto table = BuildPredictorTable(lm, UnigramMinimizer(lm), tokens);
  EXPECT_NEAR(table[2].current.surprisal, -std::log(0.8), 1e-12);
  EXPECT_FALSE(table[2].prev.has_value());
}

TEST(BuildPredictorTable, UnknownTokensAreListed) {
  const auto lm = oracle::M1();
  try {
    BuildPredictorTable(lm, UnigramMinimizer(lm), Doc("d1", {"a", "zz", "$"}));
    FAIL();
  } catch (const CoverageError& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::string>{"$", "zz"}));
  }
}

TEST(ExternalPredictors, JoinAndMissingToken) {
  const auto file = ParseExternalPredictors(
      "doc_id\ttoken_idx\ttoken\tsurprisal\tfrequency\n"
      "d1\t1\tthe\t2.0\t1.0\n"
      "d1\t2\tcat\t5.0\t6.0\n");
  const auto table = BuildPredictorTable(file, Doc("d1", {"the", "cat"}));
  ASSERT_EQ(table.size(), 2u);
  EXPECT_DOUBLE_EQ(table[1].current.pmi, 1.0);
  EXPECT_DOUBLE_EQ(table[1].prev->surprisal, 2.0);
  EXPECT_DOUBLE_EQ(table[1].current.length, 3.0);
  try {
    BuildPredictorTable(file, Doc("d1", {"the", "cat", "sat"}));
    FAIL();
  } catch (const CoverageError& e) {
    ASSERT_EQ(e.missing().size(), 1u);
    EXPECT_NE(e.missing()[0].find("sat"), std::string::npos);
  }
}

TEST(ExternalPredictors, FormatErrors) {
  const std::string head = "doc_id\ttoken_idx\ttoken\tsurprisal\tfrequency\n";
  EXPECT_THROW(ParseExternalPredictors("doc\tidx\n"), FormatError);
  EXPECT_THROW(ParseExternalPredictors(head + "d1\t2\ta\t1\t1\nd1\t2\tb\t1\t1\n"),
               FormatError);
  EXPECT_THROW(ParseExternalPredictors(head + "d1\t1\ta\t-1\t1\n"), FormatError);
  EXPECT_THROW(ParseExternalPredictors(head + "d1\t1\ta\tinf\t1\n"), FormatError);
}

TEST(ExternalPredictors, DuplicateJoinKey) {
  ExternalPredictorFile file;
  file.rows = {{"d1", 1, "a", 1.0, 1.0}, {"d1", 1, "a", 2.0, 1.0}};
  EXPECT_THROW(BuildPredictorTable(file, Doc("d1", {"a"})), FormatError);
}

TEST(FormatPredictorTable, MarksMissingSpillover) {
  const auto lm = oracle::M1();
  const auto table =
      BuildPredictorTable(lm, UnigramMinimizer(lm), Doc("d1", {"a", "a"}));
  const std::string text = FormatPredictorTable(table);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "doc_id\ttoken_idx\ttoken\tsurprisal\tfrequency\tpmi\tlength\t"
            "prev_surprisal\tprev_frequency\tprev_pmi\tprev_length\trt_ms");
  EXPECT_NE(text.find("\tNA\tNA\tNA\tNA\t250\n"), std::string::npos);
}

}  // namespace
}  // namespace ctxread
