#include "bsl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bsl {

std::uint64_t checked_pow(std::uint64_t base, int exponent, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && r > limit / base) throw BudgetError("table size overflow");
    r *= base;
  }
  return r;
}

Radix::Radix(int base, int max_digits) : base_(base) {
  pow_.resize(static_cast<std::size_t>(max_digits) + 1);
  pow_[0] = 1;
  for (int k = 1; k <= max_digits; ++k)
    pow_[static_cast<std::size_t>(k)] =
        checked_pow(static_cast<std::uint64_t>(base), k);
}

Trajectory::Trajectory(int horizon, int alphabet_size, std::uint64_t code)
    : horizon_(horizon), alphabet_size_(alphabet_size), code_(code) {
  if (horizon < 0 || alphabet_size < 1) throw ConfigError("invalid trajectory shape");
  if (code >= checked_pow(static_cast<std::uint64_t>(alphabet_size), horizon + 1))
    throw ConfigError("trajectory code out of range");
}

Trajectory Trajectory::encode(std::span<const int> sequence, int alphabet_size) {
  if (sequence.empty()) throw ConfigError("empty trajectory");
  std::uint64_t code = 0;
  for (auto it = sequence.rbegin(); it != sequence.rend(); ++it) {
    if (*it < 0 || *it >= alphabet_size)
      throw ConfigError("trajectory entry out of alphabet range");
    code = code * static_cast<std::uint64_t>(alphabet_size) + static_cast<std::uint64_t>(*it);
  }
  return Trajectory(static_cast<int>(sequence.size()) - 1, alphabet_size, code);
}

std::vector<int> Trajectory::decode() const {
  std::vector<int> out(static_cast<std::size_t>(horizon_) + 1);
  std::uint64_t c = code_;
  for (auto& v : out) {
    v = static_cast<int>(c % static_cast<std::uint64_t>(alphabet_size_));
    c /= static_cast<std::uint64_t>(alphabet_size_);
  }
  return out;
}

int Trajectory::at(int round) const {
  if (round < 0 || round > horizon_) throw ConfigError("round outside trajectory");
  return decode()[static_cast<std::size_t>(round)];
}

Trajectory Trajectory::prefix(int horizon) const {
  if (horizon < 0 || horizon > horizon_) throw ConfigError("prefix horizon out of range");
  return Trajectory(horizon, alphabet_size_,
                    code_ % checked_pow(static_cast<std::uint64_t>(alphabet_size_), horizon + 1));
}

namespace {

bool sums_to_one(std::span<const double> v, double tol) {
  double total = 0.0;
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= tol;
}

}  // namespace

SignalModel::SignalModel(std::vector<double> prior, std::vector<std::vector<double>> likelihood)
    : prior_(std::move(prior)) {
  if (prior_.empty()) throw ConfigError("signal model needs at least one state");
  if (!sums_to_one(prior_, 1e-12)) throw ConfigError("prior must be a probability vector");
  if (likelihood.size() != prior_.size())
    throw ConfigError("likelihood needs one row per state");
  num_signals_ = static_cast<int>(likelihood.front().size());
  if (num_signals_ == 0) throw ConfigError("signal model needs at least one signal");
  for (const auto& row : likelihood) {
    if (static_cast<int>(row.size()) != num_signals_)
      throw ConfigError("likelihood rows must have equal length");
    if (!sums_to_one(row, 1e-12)) throw ConfigError("likelihood row must sum to 1");
    likelihood_.insert(likelihood_.end(), row.begin(), row.end());
  }
  for (std::size_t a = 0; a < likelihood.size(); ++a)
    for (std::size_t b = a + 1; b < likelihood.size(); ++b) {
      bool same = true;
      for (int x = 0; x < num_signals_; ++x)
        same = same && std::abs(likelihood[a][static_cast<std::size_t>(x)] -
                                likelihood[b][static_cast<std::size_t>(x)]) <= 1e-12;
      if (same) throw ConfigError("signal is not informative: identical likelihood rows");
    }
}

SignalModel SignalModel::binary_symmetric(double noise, double prior_first) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw ConfigError("noise must lie in [0, 1]");
  return SignalModel({prior_first, 1.0 - prior_first},
                     {{1.0 - noise, noise}, {noise, 1.0 - noise}});
}

UtilityTable::UtilityTable(int num_actions, int num_states, std::vector<double> values)
    : num_actions_(num_actions), num_states_(num_states), values_(std::move(values)) {
  if (num_actions < 1) throw ConfigError("empty action set");
  if (values_.size() != static_cast<std::size_t>(num_actions * num_states))
    throw ConfigError("utility table has wrong size");
  for (double v : values_)
    if (!std::isfinite(v)) throw ConfigError("utility values must be finite");
}

UtilityTable UtilityTable::identity(int num_states) {
  std::vector<double> v(static_cast<std::size_t>(num_states * num_states), 0.0);
  for (int s = 0; s < num_states; ++s) v[static_cast<std::size_t>(s * num_states + s)] = 1.0;
  return UtilityTable(num_states, num_states, std::move(v));
}

Action TieBreakRule::action_for_signal(Signal x, int num_actions, int num_signals) const {
  if (!signal_to_action.empty()) {
    if (x < 0 || x >= static_cast<int>(signal_to_action.size())) return -1;
    return signal_to_action[static_cast<std::size_t>(x)];
  }
  if (num_actions == num_signals) return x;
  return -1;
}

std::string to_string(TieBreak variant) {
  switch (variant) {
    case TieBreak::OwnSignal: return "own_signal";
    case TieBreak::LowestIndex: return "lowest_index";
    case TieBreak::UniformRandom: return "uniform";
  }
  return "?";
}

TieBreak parse_tie_break(const std::string& name) {
  if (name == "own_signal") return TieBreak::OwnSignal;
  if (name == "lowest_index") return TieBreak::LowestIndex;
  if (name == "uniform") return TieBreak::UniformRandom;
  throw ConfigError("unknown tie-break rule: " + name);
}

AgentModel AgentModel::binary(double noise) {
  return {SignalModel::binary_symmetric(noise), UtilityTable::identity(2), TieBreakRule{}};
}

void AgentModel::validate() const {
  if (utility.num_states() != signals.num_states())
    throw ConfigError("utility table and signal model disagree on the number of states");
  if (tie_break.variant == TieBreak::OwnSignal) {
    for (Signal x = 0; x < num_signals(); ++x) {
      Action a = tie_break.action_for_signal(x, num_actions(), num_signals());
      if (a < 0 || a >= num_actions())
        throw ConfigError("own-signal tie-break needs a signal-to-action correspondence");
    }
  }
}

bool UpdateRule::is_deterministic(const AgentModel& model) const {
  switch (kind) {
    case RuleKind::Bayesian: return model.tie_break.is_deterministic();
    case RuleKind::Majority:
      return model.tie_break.is_deterministic() && majority_tie.is_deterministic();
    case RuleKind::CustomKernel: return false;
  }
  return false;
}

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Bayesian: return "bayesian";
    case RuleKind::Majority: return "majority";
    case RuleKind::CustomKernel: return "custom";
  }
  return "?";
}

RuleKind parse_rule(const std::string& name) {
  if (name == "bayesian") return RuleKind::Bayesian;
  if (name == "majority") return RuleKind::Majority;
  throw ConfigError("unknown update rule: " + name);
}

void normalize(std::span<double> weights, const char* what) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total))
    throw InvariantError(std::string("zero normalizer in ") + what);
  for (double& w : weights) w /= total;
}

std::vector<double> signal_posterior(const SignalModel& model, Signal x) {
  if (x < 0 || x >= model.num_signals()) throw ConfigError("signal index out of range");
  std::vector<double> post(static_cast<std::size_t>(model.num_states()));
  for (State s = 0; s < model.num_states(); ++s)
    post[static_cast<std::size_t>(s)] = model.prior(s) * model.likelihood(x, s);
  normalize(post, "signal_posterior");
  return post;
}

ActionKernel resolve_tie(std::span<const Action> tied, int num_actions,
                         const TieBreakRule& tie_break, Signal own_signal, int num_signals) {
  ActionKernel k(static_cast<std::size_t>(num_actions), 0.0);
  if (tied.size() == 1) {
    k[static_cast<std::size_t>(tied.front())] = 1.0;
    return k;
  }
  switch (tie_break.variant) {
    case TieBreak::OwnSignal: {
      Action own = tie_break.action_for_signal(own_signal, num_actions, num_signals);
      if (own < 0) throw ConfigError("own-signal tie-break without signal-to-action map");
      // An own-signal action outside the tied set falls back to the lowest index.
      bool inside = std::find(tied.begin(), tied.end(), own) != tied.end();
      k[static_cast<std::size_t>(inside ? own : tied.front())] = 1.0;
      break;
    }
    case TieBreak::LowestIndex:
      k[static_cast<std::size_t>(tied.front())] = 1.0;
      break;
    case TieBreak::UniformRandom:
      for (Action a : tied) k[static_cast<std::size_t>(a)] = 1.0 / static_cast<double>(tied.size());
      break;
  }
  return k;
}

ActionKernel map_decision(std::span<const double> posterior, const UtilityTable& utility,
                          const TieBreakRule& tie_break, Signal own_signal, int num_signals) {
  if (utility.num_actions() < 1) throw ConfigError("empty action set");
  if (static_cast<int>(posterior.size()) != utility.num_states())
    throw ConfigError("posterior has wrong dimension");
  const int na = utility.num_actions();
  std::vector<double> eu(static_cast<std::size_t>(na), 0.0);
  double best = -INFINITY;
  for (Action a = 0; a < na; ++a) {
    double v = 0.0;
    for (State s = 0; s < utility.num_states(); ++s)
      v += utility(a, s) * posterior[static_cast<std::size_t>(s)];
    eu[static_cast<std::size_t>(a)] = v;
    best = std::max(best, v);
  }
  std::vector<Action> tied;
  for (Action a = 0; a < na; ++a)
    if (best - eu[static_cast<std::size_t>(a)] <= kTieTolerance) tied.push_back(a);
  return resolve_tie(tied, na, tie_break, own_signal, num_signals);
}

ActionKernel plurality_vote(std::span<const Action> votes, int num_actions,
                            const TieBreakRule& tie, Signal own_signal, int num_signals) {
  if (votes.empty()) return {};
  std::vector<int> count(static_cast<std::size_t>(num_actions), 0);
  for (Action a : votes) {
    if (a < 0 || a >= num_actions) throw ConfigError("vote outside action set");
    ++count[static_cast<std::size_t>(a)];
  }
  int best = *std::max_element(count.begin(), count.end());
  std::vector<Action> tied;
  for (Action a = 0; a < num_actions; ++a)
    if (count[static_cast<std::size_t>(a)] == best) tied.push_back(a);
  return resolve_tie(tied, num_actions, tie, own_signal, num_signals);
}

}  // namespace bsl
