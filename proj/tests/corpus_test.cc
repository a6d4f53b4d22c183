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

#include "ctxread/corpus.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "ctxread/error.h"

namespace ctxread {
namespace {

const char kHeader[] =
    "participant\tdoc_id\tsentence_id\ttoken_idx\ttoken\trt_ms\tskipped\n";

TEST(ParseCorpus, TwoRows) {
  const auto c = ParseCorpus(std::string(kHeader) +
                             "p1\td1\ts1\t1\tThe\t210.5\t0\n"
                             "p1\td1\ts1\t2\tcat\tNA\t1\n");
  ASSERT_EQ(c.observations.size(), 2u);
  EXPECT_TRUE(c.issues.empty());
  EXPECT_DOUBLE_EQ(*c.observations[0].rt_ms, 210.5);
  EXPECT_TRUE(c.observations[1].skipped);
  EXPECT_FALSE(c.observations[1].rt_ms.has_value());
}

TEST(ParseCorpus, MissingColumn) {
  EXPECT_THROW(ParseCorpus("participant\tdoc_id\tsentence_id\ttoken_idx\ttoken"
                           "\trt_ms\np1\td1\ts1\t1\ta\t200\n"),
               FormatError);
}

std::string Rows(std::size_t n, std::size_t bad) {
  std::string text = kHeader;
  for (std::size_t i = 0; i < n; ++i) {
    text += "p1\td1\ts1\t" + std::to_string(i + 1) + "\tw\t" +
            (i < bad ? "abc" : "200") + "\t0\n";
  }
  return text;
}

TEST(ParseCorpus, OneBadRowInHundred) {
  const auto c = ParseCorpus(Rows(100, 1));
  EXPECT_EQ(c.observations.size(), 99u);
  ASSERT_EQ(c.issues.size(), 1u);
  EXPECT_EQ(c.issues[0].line, 2u);
}

TEST(ParseCorpus, TooManyBadRows) {
  EXPECT_NO_THROW(ParseCorpus(Rows(100, 5)));
  EXPECT_THROW(ParseCorpus(Rows(100, 6)), FormatError);
}

TEST(ParseCorpus, RoundTrip) {
  const auto c = ParseCorpus(Rows(10, 0));
  const auto again = ParseCorpus(FormatCorpus(c.observations));
  EXPECT_EQ(FormatCorpus(again.observations), FormatCorpus(c.observations));
}

TokenObservation Obs(const std::string& p, long long idx, double rt,
                     bool skipped) {
  TokenObservation o{p, "d1", "s1", idx, "w", rt, skipped};
  if (skipped) o.rt_ms.reset();
  return o;
}

TEST(AggregateParticipants, Examples) {
  std::vector<TokenObservation> obs = {
      Obs("p1", 1, 200, false), Obs("p2", 1, 0, true), Obs("p3", 1, 300, false),
      Obs("p1", 2, 0, true),    Obs("p2", 2, 0, true), Obs("p3", 2, 0, true),
      Obs("p1", 3, 180, false)};
  const auto agg = AggregateParticipants(obs);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].token_idx, 1);
  EXPECT_DOUBLE_EQ(agg[0].mean_rt_ms, 250.0);
  EXPECT_EQ(agg[0].contributors, 2u);
  EXPECT_EQ(agg[1].token_idx, 3);
  EXPECT_DOUBLE_EQ(agg[1].mean_rt_ms, 180.0);
  EXPECT_EQ(agg[1].contributors, 1u);

  const auto tokens = CorpusTokens(obs);
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_FALSE(tokens[1].rt_ms.has_value());
}

TEST(Standardize, Examples) {
  const std::vector<double> x = {1, 2, 3};
  const auto z = Standardize(x);
  EXPECT_DOUBLE_EQ(z[0], -1.0);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
  EXPECT_DOUBLE_EQ(z[2], 1.0);
  const std::vector<double> c = {5, 5, 5};
  EXPECT_THROW(Standardize(c), DegenerateError);
}

TEST(KFold, Sizes) {
  auto sizes = KFold(20, 10, 1).FoldSizes();
  EXPECT_TRUE(std::all_of(sizes.begin(), sizes.end(),
                          [](std::size_t s) { return s == 2; }));
  sizes = KFold(23, 10, 1).FoldSizes();
  EXPECT_EQ(std::count(sizes.begin(), sizes.end(), 3u), 3);
  EXPECT_EQ(std::count(sizes.begin(), sizes.end(), 2u), 7);
}

TEST(KFold, SeedDeterminesAssignment) {
  EXPECT_EQ(KFold(100, 10, 42).fold, KFold(100, 10, 42).fold);
  EXPECT_NE(KFold(100, 10, 42).fold, KFold(100, 10, 43).fold);
}

TEST(KFold, TrainAndTestPartitionRows) {
  const auto f = KFold(37, 5, 9);
  for (std::size_t k = 0; k < 5; ++k) {
    auto all = f.TrainRows(k);
    const auto test = f.TestRows(k);
    all.insert(all.end(), test.begin(), test.end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), 37u);
    for (std::size_t i = 0; i < 37; ++i) EXPECT_EQ(all[i], i);
  }
}

TEST(KFold, Errors) {
  EXPECT_THROW(KFold(10, 1, 1), ConfigError);
  EXPECT_THROW(KFold(3, 10, 1), ConfigError);
}

TEST(GroupKFold, KeepsGroupsTogether) {
  std::vector<std::string> groups;
  for (int d = 0; d < 12; ++d) {
    for (int i = 0; i < 5; ++i) groups.push_back("d" + std::to_string(d));
  }
  const auto f = GroupKFold(groups, 4, 3);
  for (std::size_t i = 1; i < groups.size(); ++i) {
    if (groups[i] == groups[i - 1]) {
      EXPECT_EQ(f.fold[i], f.fold[i - 1]);
    }
  }
  for (std::size_t s : f.FoldSizes()) EXPECT_EQ(s, 15u);
}

}  // namespace
}  // namespace ctxread
