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

// Exactly enumerable autoregressive language models.
//
// A model is a finite-order conditional table: the distribution of the next
// symbol (a unit or EOS) depends on the last `order` units, or on the whole
// context when it is shorter than that. Because the state space is finite,
// quantities that are infinite sums over strings (expected length, expected
// unit counts, prefix normalizer) reduce to an absorbing Markov chain and are
// computed by a linear solve. Truncated enumeration is kept as a cross-check.

#ifndef CTXREAD_LM_H_
#define CTXREAD_LM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctxread {

// Index of a unit in its alphabet; the value `alphabet.size()` is EOS.
enum class Symbol : std::uint32_t {};

inline constexpr std::size_t Index(Symbol s) {
  return static_cast<std::size_t>(s);
}

class UnitAlphabet {
 public:
  UnitAlphabet(std::vector<std::string> units, std::string eos = "$");

  // Number of units, EOS excluded.
  std::size_t size() const { return units_.size(); }
  // Units plus EOS.
  std::size_t symbol_count() const { return units_.size() + 1; }

  Symbol eos() const { return Symbol(units_.size()); }
  bool IsEos(Symbol s) const { return Index(s) == units_.size(); }

  // Throws SymbolError for anything that is neither a unit nor EOS.
  Symbol Lookup(std::string_view name) const;
  // Like Lookup, but rejects EOS.
  Symbol LookupUnit(std::string_view name) const;
  bool Contains(std::string_view name) const;

  const std::string& Name(Symbol s) const;
  const std::vector<std::string>& units() const { return units_; }
  const std::string& eos_name() const { return eos_; }

  std::vector<Symbol> Encode(std::span<const std::string> units) const;

 private:
  std::vector<std::string> units_;
  std::string eos_;
  std::unordered_map<std::string, Symbol> index_;
};

struct EnumerationBudget {
  // Longest string (or context) visited by truncated enumeration.
  std::size_t max_len = 256;
  // Largest admissible probability mass left unaccounted for.
  double tail_tol = 1e-9;

  // Throws ConfigError unless max_len >= 1 and tail_tol in (0, 1e-3].
  void Validate() const;
};

class AutoregressiveLM {
 public:
  struct State {
    // Last min(order, |context|) units. A history shorter than `order`
    // means the context itself is that short (the state is start-anchored).
    std::vector<Symbol> history;
    // Next-symbol distribution, units first and EOS last.
    std::vector<double> probs;
  };

  // Row sums must be within `sum_tol` of 1; rows are then renormalized so
  // they sum to 1 to working precision. Probabilities must be non-negative.
  // Every successor reachable with positive probability must be defined.
  AutoregressiveLM(UnitAlphabet alphabet, std::size_t order,
                   std::vector<State> states, double sum_tol = 1e-9);

  const UnitAlphabet& alphabet() const { return alphabet_; }
  std::size_t order() const { return order_; }
  std::size_t state_count() const { return states_.size(); }
  std::size_t start_state() const { return start_; }

  const State& state(std::size_t s) const { return states_[s]; }
  // "^" for the start state, "^ a b" for start-anchored histories,
  // "a b" for full-order histories.
  std::string StateKey(std::size_t s) const;

  double Prob(std::size_t state, Symbol next) const {
    return states_[state].probs[Index(next)];
  }
  std::span<const double> Probs(std::size_t state) const {
    return states_[state].probs;
  }

  // State reached after emitting `unit` in `state`; npos when undefined
  // (only possible for zero-probability transitions).
  std::size_t Successor(std::size_t state, Symbol unit) const {
    return successor_[state][Index(unit)];
  }

  // State reached after reading `context`. Throws DegenerateError when the
  // context passes through an undefined state.
  std::size_t StateOf(std::span<const Symbol> context) const;

  // Whether every entry of every table row is strictly positive.
  bool StrictlyPositive() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  UnitAlphabet alphabet_;
  std::size_t order_;
  std::vector<State> states_;
  std::vector<std::vector<std::size_t>> successor_;
  std::size_t start_ = npos;
};

// Context-independent distribution over units and EOS.
class UnigramLM {
 public:
  // Probabilities over the alphabet's symbols, EOS last. Must sum to 1
  // within 1e-9; they are renormalized. `normalizer` is informational.
  UnigramLM(UnitAlphabet alphabet, std::vector<double> probs,
            double normalizer = 1.0);

  const UnitAlphabet& alphabet() const { return alphabet_; }
  double Prob(Symbol s) const { return probs_[Index(s)]; }
  std::span<const double> Probs() const { return probs_; }
  double normalizer() const { return normalizer_; }

 private:
  UnitAlphabet alphabet_;
  std::vector<double> probs_;
  double normalizer_;
};

// p(next | context). Matches P(context next) / P(context) in prefix masses.
double Conditional(const AutoregressiveLM& lm, std::span<const Symbol> context,
                   Symbol next);
double Conditional(const AutoregressiveLM& lm,
                   std::span<const std::string> context, std::string_view next);

// Total mass of strings beginning with `prefix`, summed over continuations
// up to budget.max_len. Throws ConvergenceError when more than tail_tol of
// it lies beyond the budget.
double PrefixMass(const AutoregressiveLM& lm, std::span<const Symbol> prefix,
                  const EnumerationBudget& budget);

// Expected number of visits to each state before absorption, from the start
// state (the fundamental-matrix row of the absorbing chain). Throws
// DivergenceError when the spectral radius of the non-EOS transition matrix
// reaches 1 - 1e-9, and DegenerateError when the solve is ill-conditioned.
std::vector<double> ExpectedVisits(const AutoregressiveLM& lm);

// For each state, the expected number of contexts (itself included) still
// to be visited before absorption: the solution of (I - Q) h = 1. Zero for
// states unreachable from the start state.
std::vector<double> ExpectedRemainingPrefixes(const AutoregressiveLM& lm);

double SpectralRadius(const AutoregressiveLM& lm);

// Expected string length E|u|.
double ExpectedLength(const AutoregressiveLM& lm);

// 1 + E|u|, the constant that normalizes prefix masses into a distribution.
double PrefixNormalizer(const AutoregressiveLM& lm);

// The unigram model minimizing forward KL(p || q): q(s) is the expected
// count of s per string (EOS counted once) over the prefix normalizer.
UnigramLM UnigramMinimizer(const AutoregressiveLM& lm);

// KL divergence from lm to the string distribution of q, truncated to
// strings of length <= budget.max_len.
double ForwardKlUnigram(const AutoregressiveLM& lm, const UnigramLM& q,
                        const EnumerationBudget& budget);

// Truncated enumeration grouped by state, used to cross-check the solves.
struct TruncatedSums {
  // Sum of P(c) over contexts with |c| <= max_len, divided by 1 + E|u|.
  double context_mass = 0.0;
  // Sum over strings with |u| <= max_len of p(u) |u|.
  double partial_expected_length = 0.0;
  // Probability of strings longer than max_len.
  double string_tail = 0.0;
  // Normalized prefix mass of contexts longer than max_len.
  double context_tail = 0.0;
};
TruncatedSums EnumerateTruncated(const AutoregressiveLM& lm,
                                 const EnumerationBudget& budget);

}  // namespace ctxread

#endif  // CTXREAD_LM_H_
