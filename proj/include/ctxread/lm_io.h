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

// LM definition files.
//
//   state<TAB>unit<TAB>prob
//   ^<TAB>a<TAB>0.8
//   ^<TAB>$<TAB>0.2
//   a<TAB>a<TAB>0.25
//   a<TAB>$<TAB>0.75
//
// `^` names the start state, `$` is EOS. A state is the space-separated
// history of the last `order` units; histories shorter than the order are
// written with a leading `^`. The order is the length of the longest
// non-anchored history. Units are collected in order of first appearance in
// the unit column. Missing (state, unit) pairs have probability zero; each
// state must sum to 1 within 1e-9.

#ifndef CTXREAD_LM_IO_H_
#define CTXREAD_LM_IO_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "ctxread/lm.h"

namespace ctxread {

AutoregressiveLM ParseLmTsv(std::string_view text);
AutoregressiveLM ReadLmTsv(const std::string& path);

// Every state and symbol, probabilities at full precision.
std::string FormatLmTsv(const AutoregressiveLM& lm);

// Bigram LM over generated pseudo-words, used for synthetic corpora.
// Unit weights follow a Zipf profile; `context_strength` scales how much of
// the bigram logit comes from that profile (the rest is per-context noise),
// which controls the correlation between surprisal and frequency. Word
// length grows with frequency rank.
struct SyntheticLmOptions {
  std::size_t vocabulary = 24;
  double zipf_exponent = 1.1;
  double context_strength = 1.0;
  double context_noise = 1.0;
  double eos_prob = 0.08;
  std::uint64_t seed = 1;
};
AutoregressiveLM MakeSyntheticBigramLM(const SyntheticLmOptions& options);

}  // namespace ctxread

#endif  // CTXREAD_LM_IO_H_
