#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bsl/error.hpp"

namespace bsl {

using State = int;
using Signal = int;
using Action = int;

/// Packed trajectory code: base-|alphabet| digits, round 0 least significant.
using Code = std::uint32_t;

/// Absolute tolerance on expected-utility differences below which two
/// actions count as tied.
inline constexpr double kTieTolerance = 1e-12;

/// Probabilities below this are reported as numerically unreliable.
inline constexpr double kUnreliableBelow = 1e-13;

/// Integer power with overflow check against `limit`.
std::uint64_t checked_pow(std::uint64_t base, int exponent,
                          std::uint64_t limit = UINT64_MAX);

/// Powers of an alphabet size, cached for digit extraction on packed codes.
class Radix {
 public:
  Radix() = default;
  Radix(int base, int max_digits);

  int base() const { return base_; }
  std::uint64_t pow(int k) const { return pow_[static_cast<std::size_t>(k)]; }
  int digit(std::uint64_t code, int position) const {
    return static_cast<int>((code / pow(position)) % static_cast<std::uint64_t>(base_));
  }
  /// First `length` digits of `code`.
  std::uint64_t prefix(std::uint64_t code, int length) const { return code % pow(length); }

 private:
  int base_ = 0;
  std::vector<std::uint64_t> pow_;
};

/// An action sequence sigma(0..horizon) over a fixed alphabet.
class Trajectory {
 public:
  Trajectory(int horizon, int alphabet_size, std::uint64_t code);

  static Trajectory encode(std::span<const int> sequence, int alphabet_size);
  std::vector<int> decode() const;

  int horizon() const { return horizon_; }
  int alphabet_size() const { return alphabet_size_; }
  std::uint64_t code() const { return code_; }
  int at(int round) const;
  /// The trajectory truncated to rounds 0..horizon.
  Trajectory prefix(int horizon) const;

  bool operator==(const Trajectory&) const = default;

 private:
  int horizon_;
  int alphabet_size_;
  std::uint64_t code_;
};

/// Prior over states and conditional signal law P(x | s).
class SignalModel {
 public:
  SignalModel(std::vector<double> prior, std::vector<std::vector<double>> likelihood);

  /// Two states, two signals, signal wrong with probability `noise`.
  static SignalModel binary_symmetric(double noise, double prior_first = 0.5);

  int num_states() const { return static_cast<int>(prior_.size()); }
  int num_signals() const { return num_signals_; }
  double prior(State s) const { return prior_[static_cast<std::size_t>(s)]; }
  double likelihood(Signal x, State s) const {
    return likelihood_[static_cast<std::size_t>(s * num_signals_ + x)];
  }
  const std::vector<double>& prior_vector() const { return prior_; }

 private:
  std::vector<double> prior_;
  std::vector<double> likelihood_;  // row-major [s][x]
  int num_signals_ = 0;
};

/// Payoff u(a, s). The default is the identity payoff over states.
class UtilityTable {
 public:
  UtilityTable(int num_actions, int num_states, std::vector<double> values);
  static UtilityTable identity(int num_states);

  int num_actions() const { return num_actions_; }
  int num_states() const { return num_states_; }
  double operator()(Action a, State s) const {
    return values_[static_cast<std::size_t>(a * num_states_ + s)];
  }

 private:
  int num_actions_;
  int num_states_;
  std::vector<double> values_;
};

enum class TieBreak { OwnSignal, LowestIndex, UniformRandom };

struct TieBreakRule {
  TieBreak variant = TieBreak::OwnSignal;
  /// signal -> action used by OwnSignal; empty means the identity map.
  std::vector<Action> signal_to_action;

  bool is_deterministic() const { return variant != TieBreak::UniformRandom; }
  /// Action associated with `x` for OwnSignal, or -1 if none is declared.
  Action action_for_signal(Signal x, int num_actions, int num_signals) const;
};

/// Probability kernel over actions; deterministic decisions are 0/1 rows.
using ActionKernel = std::vector<double>;

std::string to_string(TieBreak variant);
TieBreak parse_tie_break(const std::string& name);

/// Everything that is common knowledge about agents apart from the graph:
/// signal law, payoffs, and the Bayesian tie-break rule.
struct AgentModel {
  SignalModel signals;
  UtilityTable utility;
  TieBreakRule tie_break;

  /// Uniform prior, binary symmetric noise, identity payoff, own-signal ties.
  static AgentModel binary(double noise);

  int num_actions() const { return utility.num_actions(); }
  int num_states() const { return signals.num_states(); }
  int num_signals() const { return signals.num_signals(); }
  void validate() const;
};

enum class RuleKind { Bayesian, Majority, CustomKernel };

/// Custom rule: action kernel at `round` given own signal, neighbor
/// observations through round-1 and own trajectory through round-1.
using CustomKernelFn = std::function<ActionKernel(
    int round, Signal x, std::span<const Code> neighbor_codes, Code own_code)>;

struct UpdateRule {
  RuleKind kind = RuleKind::Bayesian;
  /// Tie handling for majority votes (fair coin by default).
  TieBreakRule majority_tie{TieBreak::UniformRandom, {}};
  CustomKernelFn custom;

  static UpdateRule bayesian() { return {}; }
  static UpdateRule majority(TieBreak tie = TieBreak::UniformRandom) {
    UpdateRule r;
    r.kind = RuleKind::Majority;
    r.majority_tie.variant = tie;
    return r;
  }
  bool is_deterministic(const AgentModel& model) const;
};

std::string to_string(RuleKind kind);
RuleKind parse_rule(const std::string& name);

std::vector<double> signal_posterior(const SignalModel& model, Signal x);

/// Myopic expected-utility choice given a posterior over states.
ActionKernel map_decision(std::span<const double> posterior, const UtilityTable& utility,
                          const TieBreakRule& tie_break, Signal own_signal,
                          int num_signals);

/// Resolves a tied action set with a tie-break rule.
ActionKernel resolve_tie(std::span<const Action> tied, int num_actions,
                         const TieBreakRule& tie_break, Signal own_signal, int num_signals);

/// Plurality of the given votes with ties resolved by `tie`. Returns the
/// empty kernel when `votes` is empty.
ActionKernel plurality_vote(std::span<const Action> votes, int num_actions,
                            const TieBreakRule& tie, Signal own_signal, int num_signals);

/// Normalizes in place; throws InvariantError on a zero or non-finite total.
void normalize(std::span<double> weights, const char* what);

}  // namespace bsl
