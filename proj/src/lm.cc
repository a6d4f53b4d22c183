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

#include "ctxread/lm.h"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "ctxread/error.h"
#include "ctxread/numeric.h"

namespace ctxread {
namespace {

constexpr double kDivergenceMargin = 1e-9;
constexpr double kMaxCondition = 1e12;

std::string JoinHistory(const UnitAlphabet& alphabet,
                        std::span<const Symbol> history, bool anchored) {
  std::string key = anchored ? "^" : "";
  for (Symbol s : history) {
    if (!key.empty()) key += ' ';
    key += alphabet.Name(s);
  }
  return key;
}

// The absorbing chain over states reachable from the start state.
struct Chain {
  std::vector<std::size_t> states;     // chain index -> state
  std::vector<std::ptrdiff_t> index;   // state -> chain index or -1
  Eigen::MatrixXd transient;           // non-EOS transition probabilities
};

Chain BuildChain(const AutoregressiveLM& lm) {
  Chain chain;
  chain.index.assign(lm.state_count(), -1);
  const std::size_t units = lm.alphabet().size();
  std::deque<std::size_t> queue{lm.start_state()};
  chain.index[lm.start_state()] = 0;
  chain.states.push_back(lm.start_state());
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t u = 0; u < units; ++u) {
      if (lm.Prob(s, Symbol(u)) <= 0.0) continue;
      const std::size_t next = lm.Successor(s, Symbol(u));
      if (chain.index[next] >= 0) continue;
      chain.index[next] = static_cast<std::ptrdiff_t>(chain.states.size());
      chain.states.push_back(next);
      queue.push_back(next);
    }
  }
  const auto n = static_cast<Eigen::Index>(chain.states.size());
  chain.transient = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t s = chain.states[static_cast<std::size_t>(i)];
    for (std::size_t u = 0; u < units; ++u) {
      const double p = lm.Prob(s, Symbol(u));
      if (p <= 0.0) continue;
      chain.transient(i, chain.index[lm.Successor(s, Symbol(u))]) += p;
    }
  }
  return chain;
}

double ChainSpectralRadius(const Chain& chain) {
  if (chain.transient.rows() == 1) return std::abs(chain.transient(0, 0));
  Eigen::EigenSolver<Eigen::MatrixXd> solver(chain.transient, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// LU factorization of (I - Q), after the divergence and conditioning checks.
Eigen::PartialPivLU<Eigen::MatrixXd> FactorFundamental(const Chain& chain) {
  const double radius = ChainSpectralRadius(chain);
  if (radius >= 1.0 - kDivergenceMargin) {
    throw DivergenceError(
        "expected string length diverges: spectral radius of the non-EOS "
        "transition matrix is " + std::to_string(radius),
        radius);
  }
  const auto n = chain.transient.rows();
  Eigen::MatrixXd fundamental =
      Eigen::MatrixXd::Identity(n, n) - chain.transient;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(fundamental);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > kMaxCondition) {
    throw DegenerateError("absorbing-chain system is ill-conditioned (rcond " +
                          std::to_string(rcond) + ")");
  }
  return lu;
}

// Pushes one step of non-EOS mass through the table.
std::vector<double> Propagate(const AutoregressiveLM& lm,
                              const std::vector<double>& mass) {
  std::vector<double> next(mass.size(), 0.0);
  const std::size_t units = lm.alphabet().size();
  for (std::size_t s = 0; s < mass.size(); ++s) {
    if (mass[s] == 0.0) continue;
    for (std::size_t u = 0; u < units; ++u) {
      const double p = lm.Prob(s, Symbol(u));
      if (p <= 0.0) continue;
      next[lm.Successor(s, Symbol(u))] += mass[s] * p;
    }
  }
  return next;
}

double EosMass(const AutoregressiveLM& lm, const std::vector<double>& mass) {
  std::vector<double> terms(mass.size());
  const Symbol eos = lm.alphabet().eos();
  for (std::size_t s = 0; s < mass.size(); ++s) {
    terms[s] = mass[s] * lm.Prob(s, eos);
  }
  return PairwiseSum(terms);
}

}  // namespace

// --- UnitAlphabet ----------------------------------------------------------

UnitAlphabet::UnitAlphabet(std::vector<std::string> units, std::string eos)
    : units_(std::move(units)), eos_(std::move(eos)) {
  if (units_.empty()) throw FormatError("alphabet has no units");
  for (std::size_t i = 0; i < units_.size(); ++i) {
    if (units_[i].empty()) throw FormatError("empty unit symbol");
    if (units_[i] == eos_) {
      throw FormatError("EOS symbol '" + eos_ + "' used as a unit");
    }
    if (!index_.emplace(units_[i], Symbol(i)).second) {
      throw FormatError("duplicate unit '" + units_[i] + "'");
    }
  }
  index_.emplace(eos_, Symbol(units_.size()));
}

Symbol UnitAlphabet::Lookup(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw SymbolError(std::string(name));
  return it->second;
}

Symbol UnitAlphabet::LookupUnit(std::string_view name) const {
  const Symbol s = Lookup(name);
  if (IsEos(s)) throw SymbolError(std::string(name));
  return s;
}

bool UnitAlphabet::Contains(std::string_view name) const {
  return index_.count(std::string(name)) > 0;
}

const std::string& UnitAlphabet::Name(Symbol s) const {
  return IsEos(s) ? eos_ : units_.at(Index(s));
}

std::vector<Symbol> UnitAlphabet::Encode(
    std::span<const std::string> units) const {
  std::vector<Symbol> out;
  out.reserve(units.size());
  for (const auto& u : units) out.push_back(LookupUnit(u));
  return out;
}

void EnumerationBudget::Validate() const {
  if (max_len < 1) throw ConfigError("enumeration budget: max_len must be >= 1");
  if (!(tail_tol > 0.0 && tail_tol <= 1e-3)) {
    throw ConfigError("enumeration budget: tail_tol must lie in (0, 1e-3]");
  }
}

// --- AutoregressiveLM ------------------------------------------------------

AutoregressiveLM::AutoregressiveLM(UnitAlphabet alphabet, std::size_t order,
                                   std::vector<State> states, double sum_tol)
    : alphabet_(std::move(alphabet)), order_(order), states_(std::move(states)) {
  const std::size_t symbols = alphabet_.symbol_count();
  const std::size_t units = alphabet_.size();
  std::map<std::vector<Symbol>, std::size_t> by_history;
  for (std::size_t s = 0; s < states_.size(); ++s) {
    State& st = states_[s];
    const std::string key = StateKey(s);
    if (st.history.size() > order_) {
      throw FormatError("state '" + key + "' is longer than the model order " +
                        std::to_string(order_));
    }
    for (Symbol h : st.history) {
      if (Index(h) >= units) throw FormatError("state '" + key + "' has EOS");
    }
    if (st.probs.size() != symbols) {
      throw FormatError("state '" + key + "' has " +
                        std::to_string(st.probs.size()) +
                        " probabilities, expected " + std::to_string(symbols));
    }
    for (double p : st.probs) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw FormatError("state '" + key + "' has an invalid probability");
      }
    }
    const double total = PairwiseSum(st.probs);
    if (std::abs(total - 1.0) > sum_tol) {
      throw FormatError("probabilities of state '" + key + "' sum to " +
                        std::to_string(total));
    }
    for (double& p : st.probs) p /= total;
    if (!by_history.emplace(st.history, s).second) {
      throw FormatError("duplicate state '" + key + "'");
    }
  }
  auto start = by_history.find({});
  if (start == by_history.end()) throw FormatError("missing start state '^'");
  start_ = start->second;

  successor_.assign(states_.size(), std::vector<std::size_t>(units, npos));
  for (std::size_t s = 0; s < states_.size(); ++s) {
    for (std::size_t u = 0; u < units; ++u) {
      std::vector<Symbol> next = states_[s].history;
      next.push_back(Symbol(u));
      if (next.size() > order_) next.erase(next.begin());
      auto it = by_history.find(next);
      if (it != by_history.end()) {
        successor_[s][u] = it->second;
      } else if (states_[s].probs[u] > 0.0) {
        throw FormatError("state '" + StateKey(s) + "' emits '" +
                          alphabet_.Name(Symbol(u)) +
                          "' into an undefined state");
      }
    }
  }
}

std::string AutoregressiveLM::StateKey(std::size_t s) const {
  const State& st = states_.at(s);
  return JoinHistory(alphabet_, st.history, st.history.size() < order_ ||
                                                st.history.empty());
}

std::size_t AutoregressiveLM::StateOf(std::span<const Symbol> context) const {
  std::size_t s = start_;
  for (Symbol u : context) {
    if (Index(u) >= alphabet_.size()) {
      throw SymbolError(alphabet_.Name(u));
    }
    const std::size_t next = successor_[s][Index(u)];
    if (next == npos) {
      throw DegenerateError("context reaches an undefined state after '" +
                            StateKey(s) + "'");
    }
    s = next;
  }
  return s;
}

bool AutoregressiveLM::StrictlyPositive() const {
  for (const State& st : states_) {
    for (double p : st.probs) {
      if (p <= 0.0) return false;
    }
  }
  return true;
}

// --- UnigramLM -------------------------------------------------------------

UnigramLM::UnigramLM(UnitAlphabet alphabet, std::vector<double> probs,
                     double normalizer)
    : alphabet_(std::move(alphabet)),
      probs_(std::move(probs)),
      normalizer_(normalizer) {
  if (probs_.size() != alphabet_.symbol_count()) {
    throw FormatError("unigram model size does not match its alphabet");
  }
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw FormatError("unigram model has an invalid probability");
    }
  }
  const double total = PairwiseSum(probs_);
  if (std::abs(total - 1.0) > 1e-9) {
    throw FormatError("unigram probabilities sum to " + std::to_string(total));
  }
  for (double& p : probs_) p /= total;
}

// --- Operations ------------------------------------------------------------

double Conditional(const AutoregressiveLM& lm, std::span<const Symbol> context,
                   Symbol next) {
  if (Index(next) >= lm.alphabet().symbol_count()) {
    throw SymbolError("#" + std::to_string(Index(next)));
  }
  return lm.Prob(lm.StateOf(context), next);
}

double Conditional(const AutoregressiveLM& lm,
                   std::span<const std::string> context,
                   std::string_view next) {
  const auto encoded = lm.alphabet().Encode(context);
  return Conditional(lm, encoded, lm.alphabet().Lookup(next));
}

double PrefixMass(const AutoregressiveLM& lm, std::span<const Symbol> prefix,
                  const EnumerationBudget& budget) {
  budget.Validate();
  double head = 1.0;
  std::size_t s = lm.start_state();
  for (Symbol u : prefix) {
    if (Index(u) >= lm.alphabet().size()) throw SymbolError(lm.alphabet().Name(u));
    head *= lm.Prob(s, u);
    if (head == 0.0) return 0.0;
    s = lm.Successor(s, u);
  }
  if (prefix.size() > budget.max_len) {
    throw ConvergenceError("prefix is longer than the enumeration budget", head);
  }
  std::vector<double> mass(lm.state_count(), 0.0);
  mass[s] = head;
  std::vector<double> accounted;
  const std::size_t steps = budget.max_len - prefix.size();
  for (std::size_t step = 0;; ++step) {
    accounted.push_back(EosMass(lm, mass));
    if (step == steps) break;
    mass = Propagate(lm, mass);
  }
  const double total = PairwiseSum(accounted);
  const double remaining = PairwiseSum(Propagate(lm, mass));
  if (remaining > budget.tail_tol) {
    throw ConvergenceError(
        "enumeration budget leaves " + std::to_string(remaining) +
            " of the prefix mass unaccounted",
        remaining);
  }
  return total;
}

double SpectralRadius(const AutoregressiveLM& lm) {
  return ChainSpectralRadius(BuildChain(lm));
}

std::vector<double> ExpectedVisits(const AutoregressiveLM& lm) {
  const Chain chain = BuildChain(lm);
  const auto lu = FactorFundamental(chain);
  // Row vector e_start^T (I - Q)^{-1}, via the transposed system.
  Eigen::VectorXd start = Eigen::VectorXd::Zero(chain.transient.rows());
  start(0) = 1.0;
  const Eigen::VectorXd visits = lu.transpose().solve(start);
  std::vector<double> out(lm.state_count(), 0.0);
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    out[chain.states[i]] = visits(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::vector<double> ExpectedRemainingPrefixes(const AutoregressiveLM& lm) {
  const Chain chain = BuildChain(lm);
  const auto lu = FactorFundamental(chain);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(chain.transient.rows());
  const Eigen::VectorXd h = lu.solve(ones);
  std::vector<double> out(lm.state_count(), 0.0);
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    out[chain.states[i]] = h(static_cast<Eigen::Index>(i));
  }
  return out;
}

double ExpectedLength(const AutoregressiveLM& lm) {
  const auto visits = ExpectedVisits(lm);
  std::vector<double> terms(visits.size());
  for (std::size_t s = 0; s < visits.size(); ++s) {
    // Summed directly; 1 - p(eos|s) loses precision when p(eos|s) is near 1.
    const auto probs = lm.Probs(s);
    terms[s] = visits[s] * PairwiseSum(probs.first(lm.alphabet().size()));
  }
  return PairwiseSum(terms);
}

double PrefixNormalizer(const AutoregressiveLM& lm) {
  return 1.0 + ExpectedLength(lm);
}

UnigramLM UnigramMinimizer(const AutoregressiveLM& lm) {
  const auto visits = ExpectedVisits(lm);
  const std::size_t symbols = lm.alphabet().symbol_count();
  std::vector<double> counts(symbols, 0.0);
  std::vector<double> terms(visits.size());
  for (std::size_t sym = 0; sym < symbols; ++sym) {
    for (std::size_t s = 0; s < visits.size(); ++s) {
      terms[s] = visits[s] * lm.Prob(s, Symbol(sym));
    }
    counts[sym] = PairwiseSum(terms);
  }
  const double normalizer = PairwiseSum(counts);
  for (double& c : counts) c /= normalizer;
  return UnigramLM(lm.alphabet(), std::move(counts), normalizer);
}

double ForwardKlUnigram(const AutoregressiveLM& lm, const UnigramLM& q,
                        const EnumerationBudget& budget) {
  budget.Validate();
  if (q.alphabet().units() != lm.alphabet().units()) {
    throw AlignmentError("unigram model is over a different alphabet");
  }
  const std::size_t symbols = lm.alphabet().symbol_count();
  const std::size_t units = lm.alphabet().size();
  const std::size_t n = lm.state_count();
  // Per-state expected log ratio of one emission, split by symbol.
  std::vector<std::vector<double>> log_ratio(n, std::vector<double>(symbols));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t sym = 0; sym < symbols; ++sym) {
      const double p = lm.Prob(s, Symbol(sym));
      if (p <= 0.0) continue;
      const double qp = q.Prob(Symbol(sym));
      if (qp <= 0.0) {
        throw DegenerateError("unigram model assigns zero probability to '" +
                              lm.alphabet().Name(Symbol(sym)) + "'");
      }
      log_ratio[s][sym] = std::log(p) - std::log(qp);
    }
  }
  // mass[s]: P of contexts in state s at the current length.
  // acc[s]: sum over those contexts of P(c) * log(p(c)/q(c)).
  std::vector<double> mass(n, 0.0), acc(n, 0.0);
  mass[lm.start_state()] = 1.0;
  std::vector<double> contributions;
  const Symbol eos = lm.alphabet().eos();
  for (std::size_t len = 0;; ++len) {
    std::vector<double> finish(n);
    for (std::size_t s = 0; s < n; ++s) {
      const double pe = lm.Prob(s, eos);
      finish[s] = pe > 0.0 ? pe * (acc[s] + mass[s] * log_ratio[s][Index(eos)])
                           : 0.0;
    }
    contributions.push_back(PairwiseSum(finish));
    if (len == budget.max_len) break;
    std::vector<double> next_mass(n, 0.0), next_acc(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (mass[s] == 0.0) continue;
      for (std::size_t u = 0; u < units; ++u) {
        const double p = lm.Prob(s, Symbol(u));
        if (p <= 0.0) continue;
        const std::size_t t = lm.Successor(s, Symbol(u));
        next_mass[t] += mass[s] * p;
        next_acc[t] += p * (acc[s] + mass[s] * log_ratio[s][u]);
      }
    }
    mass.swap(next_mass);
    acc.swap(next_acc);
  }
  const double remaining = PairwiseSum(Propagate(lm, mass));
  if (remaining > budget.tail_tol) {
    throw ConvergenceError("enumeration budget leaves " +
                               std::to_string(remaining) +
                               " of the string mass unaccounted",
                           remaining);
  }
  return PairwiseSum(contributions);
}

TruncatedSums EnumerateTruncated(const AutoregressiveLM& lm,
                                 const EnumerationBudget& budget) {
  budget.Validate();
  const double normalizer = PrefixNormalizer(lm);
  std::vector<double> mass(lm.state_count(), 0.0);
  mass[lm.start_state()] = 1.0;
  std::vector<double> context_terms, length_terms;
  for (std::size_t len = 0;; ++len) {
    context_terms.push_back(PairwiseSum(mass));
    length_terms.push_back(static_cast<double>(len) * EosMass(lm, mass));
    if (len == budget.max_len) break;
    mass = Propagate(lm, mass);
  }
  TruncatedSums out;
  out.context_mass = PairwiseSum(context_terms) / normalizer;
  out.partial_expected_length = PairwiseSum(length_terms);
  const std::vector<double> beyond = Propagate(lm, mass);
  out.string_tail = PairwiseSum(beyond);

  const auto remaining = ExpectedRemainingPrefixes(lm);
  out.context_tail = PairwiseDot(beyond, remaining) / normalizer;
  return out;
}

}  // namespace ctxread
