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

// LMG relative importance: each group's incremental R^2 averaged over all
// orders of entry, computed with subset weights |S|! (p - |S| - 1)! / p!.

#ifndef CTXREAD_LMG_H_
#define CTXREAD_LMG_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ctxread/regression.h"

namespace ctxread {

struct LmgReport {
  std::vector<std::string> groups;
  // Shares with values in (-1e-10, 0) clipped to 0.
  std::vector<double> shares;
  // Unclipped shares.
  std::vector<double> raw_shares;
  double total_r2 = 0.0;
  // p!, the number of orders the shares average over.
  double orderings = 0.0;
  // R^2 of every group subset, indexed by bitmask.
  std::vector<double> subset_r2;
};

inline constexpr std::size_t kMaxLmgGroups = 12;

// Groups come from the design. Throws SizeError for more than 12 groups.
LmgReport Lmg(const DesignMatrix& x, std::span<const double> y);

}  // namespace ctxread

#endif  // CTXREAD_LMG_H_
