#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bsl/model.hpp"
#include "bsl/numeric.hpp"
#include "bsl/trajectory_table.hpp"

namespace bsl {

/// Cavity message Q^h(sigma_j^h | tau_i^{h-1}, s): the law of a neighbor's
/// observable trajectory through round h when the observer i is replaced by
/// a zombie playing tau_i and the state is fixed to s.
///
/// sigma codes live in the observation alphabet (actions, plus an inactive
/// symbol when edges can be inactive); tau codes live in the action alphabet.
/// Storage is [s][tau][sigma], so each (tau, s) slice is contiguous.
class CavityTable {
 public:
  CavityTable() = default;
  CavityTable(int horizon, int obs_alphabet, int action_alphabet, int num_states);

  int horizon() const { return horizon_; }
  int obs_alphabet() const { return obs_alphabet_; }
  int action_alphabet() const { return action_alphabet_; }
  int num_states() const { return num_states_; }
  std::uint64_t sigma_count() const { return sigma_count_; }
  std::uint64_t tau_count() const { return tau_count_; }

  double operator()(Code sigma, Code tau, State s) const {
    return values_[(static_cast<std::uint64_t>(s) * tau_count_ + tau) * sigma_count_ + sigma];
  }
  double& at(Code sigma, Code tau, State s) {
    return values_[(static_cast<std::uint64_t>(s) * tau_count_ + tau) * sigma_count_ + sigma];
  }
  std::span<const double> slice(Code tau, State s) const;
  std::span<double> slice(Code tau, State s);
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Largest |sum_sigma Q - 1| over all (tau, s) slices.
  double normalization_error() const;
  /// Largest deviation between this table summed over its last round and
  /// `previous` (one round shorter) at the truncated conditioning.
  double marginalization_error(const CavityTable& previous) const;
  /// Rescales every slice to sum to one; returns the largest drift removed.
  double renormalize();

 private:
  int horizon_ = 0;
  int obs_alphabet_ = 0;
  int action_alphabet_ = 0;
  int num_states_ = 0;
  std::uint64_t sigma_count_ = 0;
  std::uint64_t tau_count_ = 0;
  std::vector<double> values_;
};

/// One neighbor slot of a site: either a cavity message to sum over or a
/// fixed observed code (a zombie's trajectory as the site sees it).
struct SlotInput {
  const CavityTable* message = nullptr;
  Code fixed = 0;
};

/// Observation code of raw trajectory `sigma` (rounds 0..horizon) with round
/// u replaced by the inactive symbol wherever bit u of `active` is clear.
Code mask_code(Code sigma, std::uint32_t active, int horizon, const Radix& actions,
               const Radix& observations);

/// Swaps symbols 0 and 1 in every digit (other symbols untouched).
Code flip_code(Code code, int digits, const Radix& radix);

/// Law of a site's trajectory given the state: for every assignment of the
/// message slots and every own signal x, calls emit(sigma_code, weight) with
/// weight = P(x|s) * P(sigma | x, slot codes) * prod_l Q_l(code_l | sigma^{h-2}, s).
/// Messages must have horizon h-1 where h = table.horizon().
template <class Emit>
void site_law(const TrajectoryTable& table, std::span<const SlotInput> slots, State s,
              const SignalModel& model, const Radix& actions, Emit&& emit) {
  const int h = table.horizon();
  const std::uint64_t span = table.neighbor_span();
  const auto nx = static_cast<std::uint64_t>(table.num_signals());
  const std::size_t k = slots.size();
  std::vector<std::uint64_t> stride(k);
  std::uint64_t base = 0;
  std::vector<std::size_t> free_slots;
  for (std::size_t m = 0; m < k; ++m) {
    stride[m] = nx;
    for (std::size_t q = 0; q < m; ++q) stride[m] *= span;
    if (slots[m].message != nullptr && h > 0) {
      if (slots[m].message->horizon() != h - 1)
        throw InvariantError("cavity message horizon does not match decision table");
      free_slots.push_back(m);
    } else {
      base += static_cast<std::uint64_t>(h > 0 ? slots[m].fixed : 0) * stride[m];
    }
  }
  std::vector<Code> code(free_slots.size(), 0);
  for (;;) {
    std::uint64_t idx = base;
    for (std::size_t f = 0; f < free_slots.size(); ++f) idx += code[f] * stride[free_slots[f]];
    for (Signal x = 0; x < table.num_signals(); ++x) {
      const double px = model.likelihood(x, s);
      if (px == 0.0) continue;
      table.for_each(idx + static_cast<std::uint64_t>(x), [&](Code sigma, double p) {
        double w = px * p;
        if (!free_slots.empty()) {
          const Code cond = static_cast<Code>(actions.prefix(sigma, h - 1));
          for (std::size_t f = 0; f < free_slots.size() && w != 0.0; ++f)
            w *= (*slots[free_slots[f]].message)(code[f], cond, s);
        }
        emit(sigma, w);
      });
    }
    std::size_t f = 0;
    for (; f < free_slots.size(); ++f) {
      if (++code[f] < span) break;
      code[f] = 0;
    }
    if (f == free_slots.size()) break;
  }
}

struct ErrorReport {
  double error = 0.0;
  std::vector<double> error_given_state;
  /// Largest |total observation mass - 1| over (s, x).
  double max_mass_deviation = 0.0;
};

/// Decision rule evaluation for one agent at one round.
class RoundDecider {
 public:
  RoundDecider(const AgentModel& model, const UpdateRule& rule, int round, int obs_alphabet);

  /// Action kernel given own signal, observed codes through round-1 and own
  /// trajectory through round-1. `weights` is called as weights(s) only for
  /// Bayesian rules and returns the observation weight under state s.
  template <class Weights>
  ActionKernel decide(Signal x, std::span<const Code> observed, Code own_prev,
                      Weights&& weights) const {
    if (round_ == 0) return initial_[static_cast<std::size_t>(x)];
    switch (rule_->kind) {
      case RuleKind::Bayesian: {
        std::vector<double> post(static_cast<std::size_t>(model_->num_states()));
        double total = 0.0;
        for (State s = 0; s < model_->num_states(); ++s) {
          const double base = model_->signals.prior(s) * model_->signals.likelihood(x, s);
          const double w = base == 0.0 ? 0.0 : base * weights(s);
          post[static_cast<std::size_t>(s)] = w;
          total += w;
        }
        if (!(total > 0.0)) return initial_[static_cast<std::size_t>(x)];
        for (double& p : post) p /= total;
        return map_decision(post, model_->utility, model_->tie_break, x, model_->num_signals());
      }
      case RuleKind::Majority: return majority(x, observed, own_prev);
      case RuleKind::CustomKernel: return custom(x, observed, own_prev);
    }
    return {};
  }

  int round() const { return round_; }

 private:
  ActionKernel majority(Signal x, std::span<const Code> observed, Code own_prev) const;
  ActionKernel custom(Signal x, std::span<const Code> observed, Code own_prev) const;

  const AgentModel* model_;
  const UpdateRule* rule_;
  int round_;
  Radix actions_;
  Radix observations_;
  std::vector<ActionKernel> initial_;
};

/// Builds the horizon-t trajectory table of a site with `num_neighbors`
/// observed neighbors from its horizon-(t-1) table (ignored at t = 0).
/// weights(s, x, observed through t-1, own prefix through t-2) is the
/// probability of the observation under s with the site acting as a zombie.
template <class Weights>
TrajectoryTable build_trajectory_table(const TrajectoryTable* previous, int num_neighbors,
                                       int round, const AgentModel& model,
                                       const UpdateRule& rule, int obs_alphabet,
                                       Weights&& weights) {
  const int na = model.num_actions();
  TrajectoryTable out(round, num_neighbors, model.num_signals(), obs_alphabet, na);
  out.reserve_all();
  const RoundDecider decider(model, rule, round, obs_alphabet);
  const Radix actions(na, round + 1);
  const Radix obs(obs_alphabet, round + 1);
  const std::uint64_t trunc = round > 0 ? obs.pow(round - 1) : 1;
  std::vector<Code> observed(static_cast<std::size_t>(num_neighbors), 0);
  std::vector<Code> truncated(static_cast<std::size_t>(num_neighbors), 0);
  std::vector<TrajectoryTable::Outcome> row;
  for (std::uint64_t idx = 0; idx < out.input_count(); ++idx) {
    Signal x = 0;
    out.decode_index(idx, x, observed);
    row.clear();
    if (round == 0) {
      const ActionKernel k = decider.decide(x, observed, 0, [](State) { return 1.0; });
      for (Action a = 0; a < na; ++a)
        if (k[static_cast<std::size_t>(a)] > 0.0)
          row.push_back({static_cast<Code>(a), k[static_cast<std::size_t>(a)]});
    } else {
      for (std::size_t m = 0; m < observed.size(); ++m)
        truncated[m] = static_cast<Code>(observed[m] % trunc);
      const std::uint64_t prev_idx = previous->index(x, truncated);
      previous->for_each(prev_idx, [&](Code own, double p) {
        const Code own_prefix = static_cast<Code>(actions.prefix(own, round - 1));
        const ActionKernel k = decider.decide(
            x, observed, own, [&](State s) { return weights(s, x, std::span<const Code>(observed), own_prefix); });
        for (Action a = 0; a < na; ++a) {
          const double q = k[static_cast<std::size_t>(a)];
          if (q > 0.0)
            row.push_back({static_cast<Code>(own + static_cast<std::uint64_t>(a) * actions.pow(round)),
                           p * q});
        }
      });
    }
    out.append(row);
  }
  return out;
}

/// Error probability of a site at round t = table.horizon() (requires
/// actions = states): sum over s, x, observed tuples and own trajectories of
/// P(s) P(x|s) weights(s, x, observed, own prefix) P(sigma | x, observed)
/// 1[sigma(t) != s]. Also checks that the observation mass sums to one.
template <class Weights>
ErrorReport site_error(const TrajectoryTable& table, const AgentModel& model,
                       Weights&& weights) {
  if (model.num_actions() != model.num_states())
    throw ConfigError("error probability needs the action set to equal the state set");
  const int t = table.horizon();
  const int ns = model.num_states();
  const int nx = model.num_signals();
  const Radix actions(model.num_actions(), t + 1);
  const std::size_t k = static_cast<std::size_t>(table.num_neighbors());
  std::vector<CompensatedSum> err(static_cast<std::size_t>(ns * nx));
  std::vector<CompensatedSum> mass(static_cast<std::size_t>(ns * nx));
  std::vector<Code> observed(k, 0);
  const std::uint64_t tuples = table.input_count() / static_cast<std::uint64_t>(nx);
  for (std::uint64_t tup = 0; tup < tuples; ++tup) {
    Signal dummy = 0;
    table.decode_index(tup * static_cast<std::uint64_t>(nx), dummy, observed);
    for (Signal x = 0; x < nx; ++x) {
      table.for_each(tup * static_cast<std::uint64_t>(nx) + static_cast<std::uint64_t>(x),
                     [&](Code sigma, double p) {
                       const Code own_prefix =
                           t > 0 ? static_cast<Code>(actions.prefix(sigma, t - 1)) : 0;
                       const int act = actions.digit(sigma, t);
                       for (State s = 0; s < ns; ++s) {
                         const double w =
                             t > 0 ? p * weights(s, x, std::span<const Code>(observed), own_prefix)
                                   : p;
                         const auto slot = static_cast<std::size_t>(s * nx + x);
                         mass[slot].add(w);
                         if (act != s) err[slot].add(w);
                       }
                     });
    }
  }
  ErrorReport rep;
  rep.error_given_state.assign(static_cast<std::size_t>(ns), 0.0);
  CompensatedSum total;
  for (State s = 0; s < ns; ++s) {
    CompensatedSum given;
    for (Signal x = 0; x < nx; ++x) {
      const auto slot = static_cast<std::size_t>(s * nx + x);
      const double px = model.signals.likelihood(x, s);
      if (px == 0.0) continue;
      given.add(px * err[slot].value());
      rep.max_mass_deviation = std::max(rep.max_mass_deviation, std::abs(mass[slot].value() - 1.0));
    }
    rep.error_given_state[static_cast<std::size_t>(s)] = given.value();
    total.add(model.signals.prior(s) * given.value());
  }
  rep.error = total.value();
  return rep;
}

/// Posterior over states of an agent with signal x who observed `observed`
/// (through t-1) given its own trajectory prefix (through t-2) and the cavity
/// messages of its neighbors (horizon t-1), in canonical neighbor order.
std::vector<double> posterior(Signal x, std::span<const Code> observed, Code own_prefix,
                              std::span<const CavityTable* const> messages,
                              const SignalModel& model);

}  // namespace bsl
