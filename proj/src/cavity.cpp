#include "bsl/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bsl {

CavityTable::CavityTable(int horizon, int obs_alphabet, int action_alphabet, int num_states)
    : horizon_(horizon),
      obs_alphabet_(obs_alphabet),
      action_alphabet_(action_alphabet),
      num_states_(num_states) {
  sigma_count_ = checked_pow(static_cast<std::uint64_t>(obs_alphabet), horizon + 1,
                             std::numeric_limits<Code>::max());
  tau_count_ = checked_pow(static_cast<std::uint64_t>(action_alphabet), horizon,
                           std::numeric_limits<Code>::max());
  values_.assign(sigma_count_ * tau_count_ * static_cast<std::uint64_t>(num_states), 0.0);
}

std::span<const double> CavityTable::slice(Code tau, State s) const {
  return {values_.data() + (static_cast<std::uint64_t>(s) * tau_count_ + tau) * sigma_count_,
          sigma_count_};
}

std::span<double> CavityTable::slice(Code tau, State s) {
  return {values_.data() + (static_cast<std::uint64_t>(s) * tau_count_ + tau) * sigma_count_,
          sigma_count_};
}

double CavityTable::normalization_error() const {
  double worst = 0.0;
  for (State s = 0; s < num_states_; ++s)
    for (Code tau = 0; tau < tau_count_; ++tau) {
      CompensatedSum sum;
      for (double v : slice(tau, s)) sum.add(v);
      worst = std::max(worst, std::abs(sum.value() - 1.0));
    }
  return worst;
}

double CavityTable::marginalization_error(const CavityTable& previous) const {
  if (previous.horizon_ + 1 != horizon_ || previous.obs_alphabet_ != obs_alphabet_)
    throw InvariantError("marginalization check needs consecutive horizons");
  const std::uint64_t prev_sigma = previous.sigma_count_;
  const std::uint64_t prev_tau = previous.tau_count_;
  double worst = 0.0;
  for (State s = 0; s < num_states_; ++s)
    for (Code tau = 0; tau < tau_count_; ++tau) {
      const auto cur = slice(tau, s);
      const auto old = previous.slice(static_cast<Code>(tau % prev_tau), s);
      for (std::uint64_t low = 0; low < prev_sigma; ++low) {
        double sum = 0.0;
        for (std::uint64_t top = 0; top < static_cast<std::uint64_t>(obs_alphabet_); ++top)
          sum += cur[low + top * prev_sigma];
        worst = std::max(worst, std::abs(sum - old[low]));
      }
    }
  return worst;
}

double CavityTable::renormalize() {
  double worst = 0.0;
  for (State s = 0; s < num_states_; ++s)
    for (Code tau = 0; tau < tau_count_; ++tau) {
      auto sl = slice(tau, s);
      CompensatedSum sum;
      for (double v : sl) sum.add(v);
      const double total = sum.value();
      worst = std::max(worst, std::abs(total - 1.0));
      if (!(total > 0.0)) throw InvariantError("cavity slice has zero mass");
      for (double& v : sl) v /= total;
    }
  return worst;
}

Code mask_code(Code sigma, std::uint32_t active, int horizon, const Radix& actions,
               const Radix& observations) {
  const int inactive = actions.base();
  std::uint64_t out = 0;
  for (int u = horizon; u >= 0; --u) {
    const int d = (active >> u) & 1U ? actions.digit(sigma, u) : inactive;
    out = out * static_cast<std::uint64_t>(observations.base()) + static_cast<std::uint64_t>(d);
  }
  return static_cast<Code>(out);
}

Code flip_code(Code code, int digits, const Radix& radix) {
  std::uint64_t out = 0;
  for (int u = digits - 1; u >= 0; --u) {
    int d = radix.digit(code, u);
    if (d == 0)
      d = 1;
    else if (d == 1)
      d = 0;
    out = out * static_cast<std::uint64_t>(radix.base()) + static_cast<std::uint64_t>(d);
  }
  return static_cast<Code>(out);
}

RoundDecider::RoundDecider(const AgentModel& model, const UpdateRule& rule, int round,
                           int obs_alphabet)
    : model_(&model),
      rule_(&rule),
      round_(round),
      actions_(model.num_actions(), round + 1),
      observations_(obs_alphabet, round + 1) {
  if (round == 0) {
    for (Signal x = 0; x < model.num_signals(); ++x) {
      if (rule.kind == RuleKind::CustomKernel) {
        initial_.push_back(custom(x, {}, 0));
        continue;
      }
      const auto post = signal_posterior(model.signals, x);
      initial_.push_back(
          map_decision(post, model.utility, model.tie_break, x, model.num_signals()));
    }
  } else if (rule.kind == RuleKind::Bayesian) {
    // Fallback for observations that are impossible under every state.
    for (Signal x = 0; x < model.num_signals(); ++x) {
      const auto post = signal_posterior(model.signals, x);
      initial_.push_back(
          map_decision(post, model.utility, model.tie_break, x, model.num_signals()));
    }
  }
}

ActionKernel RoundDecider::majority(Signal x, std::span<const Code> observed,
                                    Code own_prev) const {
  std::vector<Action> votes;
  votes.reserve(observed.size());
  for (Code c : observed) {
    const int v = observations_.digit(c, round_ - 1);
    if (v < model_->num_actions()) votes.push_back(v);
  }
  ActionKernel k = plurality_vote(votes, model_->num_actions(), rule_->majority_tie, x,
                                  model_->num_signals());
  if (k.empty()) {
    // Nothing observed this round: repeat the previous vote.
    k.assign(static_cast<std::size_t>(model_->num_actions()), 0.0);
    k[static_cast<std::size_t>(actions_.digit(own_prev, round_ - 1))] = 1.0;
  }
  return k;
}

ActionKernel RoundDecider::custom(Signal x, std::span<const Code> observed, Code own_prev) const {
  if (!rule_->custom) throw ConfigError("custom update rule without a kernel function");
  ActionKernel k = rule_->custom(round_, x, observed, own_prev);
  if (static_cast<int>(k.size()) != model_->num_actions())
    throw ConfigError("custom kernel has wrong dimension");
  double total = 0.0;
  for (double v : k) {
    if (!(v >= 0.0)) throw ConfigError("custom kernel has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("custom kernel row must sum to 1");
  return k;
}

std::vector<double> posterior(Signal x, std::span<const Code> observed, Code own_prefix,
                              std::span<const CavityTable* const> messages,
                              const SignalModel& model) {
  if (observed.size() != messages.size())
    throw ConfigError("one cavity message per observed neighbor is required");
  if (x < 0 || x >= model.num_signals()) throw ConfigError("signal index out of range");
  std::vector<double> post(static_cast<std::size_t>(model.num_states()));
  for (State s = 0; s < model.num_states(); ++s) {
    double w = model.prior(s) * model.likelihood(x, s);
    for (std::size_t m = 0; m < observed.size(); ++m)
      w *= (*messages[m])(observed[m], own_prefix, s);
    post[static_cast<std::size_t>(s)] = w;
  }
  normalize(post, "posterior (observation impossible under every state)");
  return post;
}

}  // namespace bsl
