#include "bsl/ensemble_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <string>

namespace bsl {

std::uint64_t accumulate_site_message(const TrajectoryTable& g, int degree,
                                      const CavityTable* previous, const AgentModel& model,
                                      double activation, double scale, CavityTable& out,
                                      int threads) {
  const int t = g.horizon();
  const int na = model.num_actions();
  const int nb = out.obs_alphabet();
  if (degree < 1) throw InvariantError("a message needs a site with at least one neighbor");
  if (g.num_neighbors() != degree || out.horizon() != t)
    throw InvariantError("decision table does not match the message shape");
  if (t > 0 && (previous == nullptr || previous->horizon() != t - 1))
    throw InvariantError("cavity step needs the previous message");
  const bool masked = nb != na;
  const Radix actions(na, t + 1);
  const Radix obs(nb, t + 1);

  std::vector<SlotInput> base_slots(static_cast<std::size_t>(degree));
  for (std::size_t m = 1; m < base_slots.size(); ++m) base_slots[m].message = previous;

  // Activation patterns of the parent edge over rounds 0..t-1, with weights.
  std::vector<std::pair<std::uint32_t, double>> patterns;
  if (!masked) {
    patterns.emplace_back((1U << t) - 1U, 1.0);
  } else {
    for (std::uint32_t a = 0; a < (1U << t); ++a) {
      double w = 1.0;
      for (int u = 0; u < t; ++u) w *= (a >> u) & 1U ? activation : 1.0 - activation;
      if (w > 0.0) patterns.emplace_back(a, w);
    }
  }

  const std::uint64_t taus = out.tau_count();
  const std::uint64_t jobs = taus * static_cast<std::uint64_t>(model.num_states());
  std::atomic<std::uint64_t> ops{0};
  parallel_chunks(jobs, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<SlotInput> slots = base_slots;
    std::vector<CompensatedSum> acc(out.sigma_count());
    std::uint64_t local_ops = 0;
    for (std::size_t job = begin; job < end; ++job) {
      const State s = static_cast<State>(job / taus);
      const Code tau = static_cast<Code>(job % taus);
      std::fill(acc.begin(), acc.end(), CompensatedSum{});
      for (const auto& [a_prev, w_prev] : patterns) {
        slots[0].fixed = masked && t > 0 ? mask_code(tau, a_prev, t - 1, actions, obs) : tau;
        site_law(g, slots, s, model.signals, actions, [&](Code sigma, double w) {
          ++local_ops;
          if (!masked) {
            acc[sigma].add(w);
            return;
          }
          for (std::uint32_t last = 0; last < 2; ++last) {
            const double wl = last ? activation : 1.0 - activation;
            if (wl == 0.0) continue;
            const Code code = mask_code(sigma, a_prev | (last << t), t, actions, obs);
            acc[code].add(w_prev * wl * w);
          }
        });
      }
      auto slice = out.slice(tau, s);
      for (std::size_t k = 0; k < acc.size(); ++k) slice[k] += scale * acc[k].value();
    }
    ops += local_ops;
  });
  return ops.load();
}

namespace {

std::uint64_t table_bytes(const TrajectoryTable& g) { return g.memory_bytes(); }

}  // namespace

EnsembleEngine::EnsembleEngine(AgentModel model, UpdateRule rule, DegreeDistribution rho_v,
                               double activation, EngineOptions options)
    : model_(std::move(model)),
      rule_(std::move(rule)),
      rho_v_(std::move(rho_v)),
      rho_e_(edge_perspective(rho_v_)),
      activation_(activation),
      options_(options),
      obs_alphabet_(model_.num_actions() + (activation < 1.0 ? 1 : 0)) {
  model_.validate();
  if (!(activation > 0.0) || activation > 1.0)
    throw ConfigError("edge activation probability must lie in (0, 1]");
  for (int d : rho_v_.support()) decisions_[d];
  build_decisions(0);
}

void EnsembleEngine::check_budget(int t) const {
  std::uint64_t needed = 0;
  for (const auto& [d, tables] : decisions_) {
    for (const auto& g : tables) needed += table_bytes(g);
    for (int u = static_cast<int>(tables.size()); u <= t; ++u)
      needed += TrajectoryTable::estimate_bytes(u, d, model_.num_signals(), obs_alphabet_);
  }
  if (needed > options_.memory_budget)
    throw BudgetError("decision tables through round " + std::to_string(t) + " need about " +
                      std::to_string(needed >> 20) + " MiB, over the " +
                      std::to_string(options_.memory_budget >> 20) + " MiB budget");
}

void EnsembleEngine::build_decisions(int t) {
  check_budget(t);
  for (auto& [d, tables] : decisions_) {
    const TrajectoryTable* prev = t > 0 ? &tables.back() : nullptr;
    tables.push_back(build_trajectory_table(
        prev, d, t, model_, rule_, obs_alphabet_,
        [&](State s, Signal, std::span<const Code> observed, Code own_prefix) {
          return observation_weight(s, observed, own_prefix, t);
        }));
  }
}

double EnsembleEngine::observation_weight(State s, std::span<const Code> observed,
                                          Code own_prefix, int t) const {
  if (t == 0) return 1.0;
  const CavityTable& q = messages_[static_cast<std::size_t>(t - 1)];
  double w = 1.0;
  for (Code c : observed) {
    w *= q(c, own_prefix, s);
    if (w == 0.0) break;
  }
  return w;
}

void EnsembleEngine::advance() {
  const auto start = std::chrono::steady_clock::now();
  const int t = horizon_;
  CavityTable q(t, obs_alphabet_, model_.num_actions(), model_.num_states());
  const CavityTable* prev = t > 0 ? &messages_.back() : nullptr;
  StepReport rep;
  rep.horizon = t;
  for (std::size_t k = 0; k < rho_e_.support().size(); ++k) {
    const int d = rho_e_.support()[k];
    auto it = decisions_.find(d);
    if (it == decisions_.end())
      throw InvariantError("no decision table for degree " + std::to_string(d));
    rep.operations += accumulate_site_message(it->second[static_cast<std::size_t>(t)], d, prev,
                                              model_, activation_, rho_e_.probs()[k], q,
                                              options_.threads);
  }
  rep.normalization_drift = q.normalization_error();
  if (prev != nullptr) rep.marginalization_error = q.marginalization_error(*prev);
  if (options_.renormalize) q.renormalize();
  messages_.push_back(std::move(q));
  build_decisions(t + 1);
  horizon_ = t + 1;
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  steps_.push_back(rep);
}

void EnsembleEngine::advance_to(int t) {
  check_budget(t);
  while (horizon_ < t) advance();
}

ErrorReport EnsembleEngine::error_report(int t, int degree) const {
  const TrajectoryTable& g = decision(degree, t);
  return site_error(g, model_,
                    [&](State s, Signal, std::span<const Code> observed, Code own_prefix) {
                      return observation_weight(s, observed, own_prefix, t);
                    });
}

ErrorReport EnsembleEngine::error_report(int t) const {
  ErrorReport out;
  out.error_given_state.assign(static_cast<std::size_t>(model_.num_states()), 0.0);
  for (std::size_t k = 0; k < rho_v_.support().size(); ++k) {
    const double p = rho_v_.probs()[k];
    if (p == 0.0) continue;
    const ErrorReport r = error_report(t, rho_v_.support()[k]);
    out.error += p * r.error;
    for (std::size_t s = 0; s < out.error_given_state.size(); ++s)
      out.error_given_state[s] += p * r.error_given_state[s];
    out.max_mass_deviation = std::max(out.max_mass_deviation, r.max_mass_deviation);
  }
  return out;
}

const CavityTable& EnsembleEngine::message(int h) const {
  if (h < 0 || h >= static_cast<int>(messages_.size()))
    throw ConfigError("message horizon " + std::to_string(h) + " not computed");
  return messages_[static_cast<std::size_t>(h)];
}

const TrajectoryTable& EnsembleEngine::decision(int degree, int t) const {
  auto it = decisions_.find(degree);
  if (it == decisions_.end())
    throw ConfigError("no decision table for degree " + std::to_string(degree));
  if (t < 0 || t > horizon_)
    throw ConfigError("round " + std::to_string(t) + " beyond the computed horizon");
  return it->second[static_cast<std::size_t>(t)];
}

std::vector<double> EnsembleEngine::posterior(Signal x, std::span<const Code> observed,
                                              int t) const {
  if (t == 0) return signal_posterior(model_.signals, x);
  const int degree = static_cast<int>(observed.size());
  const TrajectoryTable& g = decision(degree, t - 1);
  if (!g.deterministic())
    throw ConfigError("posterior lookup needs a deterministic rule");
  const Radix obs(obs_alphabet_, t + 1);
  std::vector<Code> truncated(observed.begin(), observed.end());
  for (auto& c : truncated) c = static_cast<Code>(obs.prefix(c, t - 1));
  const Radix actions(model_.num_actions(), t + 1);
  const Code own = g.code(g.index(x, truncated));
  const Code own_prefix = static_cast<Code>(actions.prefix(own, t - 1));
  std::vector<const CavityTable*> msgs(observed.size(), &message(t - 1));
  return bsl::posterior(x, observed, own_prefix, msgs, model_.signals);
}

}  // namespace bsl
