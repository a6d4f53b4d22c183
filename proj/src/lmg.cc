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

#include "ctxread/lmg.h"

#include <bit>

#include "ctxread/error.h"
#include "ctxread/numeric.h"

namespace ctxread {

LmgReport Lmg(const DesignMatrix& x, std::span<const double> y) {
  const std::size_t p = x.groups().size();
  if (p > kMaxLmgGroups) {
    throw SizeError("LMG over " + std::to_string(p) +
                    " groups exceeds the limit of " +
                    std::to_string(kMaxLmgGroups));
  }
  if (p == 0) throw SizeError("LMG needs at least one predictor group");

  LmgReport out;
  out.groups = x.groups();
  const unsigned long long subsets = 1ULL << p;
  out.subset_r2.assign(subsets, 0.0);
  for (unsigned long long mask = 1; mask < subsets; ++mask) {
    out.subset_r2[mask] = OlsFit(x.GroupSubset(mask), y).r2;
  }
  out.total_r2 = out.subset_r2[subsets - 1];

  std::vector<double> factorial(p + 1, 1.0);
  for (std::size_t i = 1; i <= p; ++i) factorial[i] = factorial[i - 1] * i;
  out.orderings = factorial[p];

  out.raw_shares.resize(p);
  for (std::size_t g = 0; g < p; ++g) {
    const unsigned long long bit = 1ULL << g;
    std::vector<double> terms;
    terms.reserve(subsets / 2);
    for (unsigned long long mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      const double w = factorial[s] * factorial[p - s - 1] / factorial[p];
      terms.push_back(w * (out.subset_r2[mask | bit] - out.subset_r2[mask]));
    }
    out.raw_shares[g] = PairwiseSum(terms);
  }
  out.shares = out.raw_shares;
  for (double& s : out.shares) {
    if (s < 0.0 && s > -1e-10) s = 0.0;
  }
  return out;
}

}  // namespace ctxread
