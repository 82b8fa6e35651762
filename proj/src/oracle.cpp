#include "bsl/oracle.hpp"

#include <algorithm>
#include <string>

#include "bsl/cavity.hpp"

namespace bsl {

Oracle::Oracle(Graph graph, AgentModel model, UpdateRule rule, int t_max, OracleOptions options)
    : graph_(std::move(graph)),
      model_(std::move(model)),
      rule_(std::move(rule)),
      t_max_(t_max),
      options_(options),
      obs_alphabet_(model_.num_actions() + (options.activation < 1.0 ? 1 : 0)) {
  model_.validate();
  if (t_max < 0) throw ConfigError("oracle horizon must be non-negative");
  if (!(options.activation > 0.0) || options.activation > 1.0)
    throw ConfigError("edge activation probability must lie in (0, 1]");
  const int n = graph_.size();
  vectors_ = checked_pow(static_cast<std::uint64_t>(model_.num_signals()), n,
                         options.budget);
  if (static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(t_max + 1) * vectors_ >
      options.budget)
    throw BudgetError("oracle budget exceeded: n * t * |X|^n = " +
                      std::to_string(static_cast<std::uint64_t>(n) *
                                     static_cast<std::uint64_t>(t_max + 1) * vectors_));

  std::map<Edge, int> undirected;
  for (const auto& [a, b] : graph_.edges()) undirected.emplace(Edge{std::min(a, b), std::max(a, b)}, channels_++);
  std::map<Edge, int> directed;
  for (const auto& e : graph_.directed_edges()) directed.emplace(e, channels_++);
  channel_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j : graph_.observed(i)) {
      auto it = undirected.find({std::min(i, j), std::max(i, j)});
      channel_[static_cast<std::size_t>(i)].push_back(it != undirected.end() ? it->second
                                                                          : directed.at({i, j}));
    }
  unroll();
}

Signal Oracle::signal_of(std::uint64_t index, int node) const {
  for (int k = 0; k < node; ++k) index /= static_cast<std::uint64_t>(model_.num_signals());
  return static_cast<Signal>(index % static_cast<std::uint64_t>(model_.num_signals()));
}

Code Oracle::observed_code(const World& w, int observer, int observed, int rounds) const {
  const int slot = graph_.observed_slot(observer, observed);
  const Code sigma = w.traj[static_cast<std::size_t>(observed)];
  const int na = model_.num_actions();
  std::uint64_t out = 0;
  const std::uint32_t act =
      w.active[static_cast<std::size_t>(channel_[static_cast<std::size_t>(observer)][static_cast<std::size_t>(slot)])];
  std::uint64_t scale = 1;
  std::uint64_t rest = sigma;
  for (int u = 0; u < rounds; ++u) {
    const int a = static_cast<int>(rest % static_cast<std::uint64_t>(na));
    rest /= static_cast<std::uint64_t>(na);
    const int symbol = obs_alphabet_ == na || ((act >> u) & 1U) ? a : na;
    out += scale * static_cast<std::uint64_t>(symbol);
    scale *= static_cast<std::uint64_t>(obs_alphabet_);
  }
  return static_cast<Code>(out);
}

void Oracle::unroll() {
  const int n = graph_.size();
  const int ns = model_.num_states();
  const int na = model_.num_actions();
  const double p = options_.activation;

  // P(signal vector | s), in index order.
  std::vector<std::vector<double>> vector_prob(static_cast<std::size_t>(ns),
                                               std::vector<double>(vectors_));
  std::vector<std::vector<Signal>> signals(vectors_, std::vector<Signal>(static_cast<std::size_t>(n)));
  for (std::uint64_t v = 0; v < vectors_; ++v) {
    for (int i = 0; i < n; ++i) signals[v][static_cast<std::size_t>(i)] = signal_of(v, i);
    for (State s = 0; s < ns; ++s) {
      double w = 1.0;
      for (int i = 0; i < n; ++i) w *= model_.signals.likelihood(signals[v][static_cast<std::size_t>(i)], s);
      vector_prob[static_cast<std::size_t>(s)][v] = w;
    }
  }

  worlds_.assign(vectors_, {World{std::vector<Code>(static_cast<std::size_t>(n), 0),
                                  std::vector<std::uint32_t>(static_cast<std::size_t>(channels_), 0),
                                  1.0}});
  decisions_.assign(static_cast<std::size_t>(t_max_) + 1,
                    std::vector<std::map<Key, ActionKernel>>(static_cast<std::size_t>(n)));
  posteriors_.assign(static_cast<std::size_t>(t_max_) + 1,
                     std::vector<std::map<Key, std::vector<double>>>(static_cast<std::size_t>(n)));

  auto key_of = [&](const World& w, int i, Signal x, int t) {
    Key key{static_cast<Code>(x)};
    for (int j : graph_.observed(i)) key.push_back(observed_code(w, i, j, t));
    key.push_back(static_cast<Code>(Radix(na, t + 1).prefix(w.traj[static_cast<std::size_t>(i)], t)));
    return key;
  };

  for (int t = 0; t <= t_max_; ++t) {
    const Radix actions(na, t + 1);
    const RoundDecider decider(model_, rule_, t, obs_alphabet_);

    // Observation weights: sum over the other signals and worlds matching a key.
    std::vector<std::map<Key, std::vector<double>>> weights(static_cast<std::size_t>(n));
    if (rule_.kind == RuleKind::Bayesian && t > 0) {
      for (std::uint64_t v = 0; v < vectors_; ++v)
        for (const World& w : worlds_[v])
          for (int i = 0; i < n; ++i) {
            const Signal x = signals[v][static_cast<std::size_t>(i)];
            auto& slot = weights[static_cast<std::size_t>(i)][key_of(w, i, x, t)];
            slot.resize(static_cast<std::size_t>(ns), 0.0);
            for (State s = 0; s < ns; ++s) {
              const double px = model_.signals.likelihood(x, s);
              if (px == 0.0) continue;
              slot[static_cast<std::size_t>(s)] += vector_prob[static_cast<std::size_t>(s)][v] / px * w.weight;
            }
          }
      for (int i = 0; i < n; ++i)
        for (const auto& [key, ws] : weights[static_cast<std::size_t>(i)]) {
          std::vector<double> post(static_cast<std::size_t>(ns));
          double total = 0.0;
          for (State s = 0; s < ns; ++s) {
            post[static_cast<std::size_t>(s)] = model_.signals.prior(s) *
                                                model_.signals.likelihood(static_cast<Signal>(key[0]), s) *
                                                ws[static_cast<std::size_t>(s)];
            total += post[static_cast<std::size_t>(s)];
          }
          if (total > 0.0) {
            for (double& q : post) q /= total;
            posteriors_[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)][key] = post;
          }
        }
    }

    std::uint64_t total_worlds = 0;
    for (std::uint64_t v = 0; v < vectors_; ++v) {
      std::map<std::pair<std::vector<Code>, std::vector<std::uint32_t>>, double> next;
      for (const World& w : worlds_[v]) {
        // Kernel of every node in this world.
        std::vector<ActionKernel> kernels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          const Signal x = signals[v][static_cast<std::size_t>(i)];
          Key key = key_of(w, i, x, t);
          std::span<const Code> observed(key.data() + 1, key.size() - 2);
          const auto& ws = weights[static_cast<std::size_t>(i)];
          auto it = ws.find(key);
          ActionKernel k = decider.decide(x, observed, key.back(), [&](State s) {
            return it == ws.end() ? 0.0 : it->second[static_cast<std::size_t>(s)];
          });
          decisions_[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)].emplace(std::move(key), k);
          kernels[static_cast<std::size_t>(i)] = std::move(k);
        }
        // Branch over joint action profiles (and activations for round t).
        std::vector<Action> choice(static_cast<std::size_t>(n), 0);
        auto emit_profile = [&](double w_actions) {
          std::vector<Code> traj = w.traj;
          for (int i = 0; i < n; ++i)
            traj[static_cast<std::size_t>(i)] +=
                static_cast<Code>(static_cast<std::uint64_t>(choice[static_cast<std::size_t>(i)]) * actions.pow(t));
          if (obs_alphabet_ == na || t == t_max_) {
            next[{traj, w.active}] += w.weight * w_actions;
            return;
          }
          for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << channels_); ++pattern) {
            double wa = 1.0;
            std::vector<std::uint32_t> act = w.active;
            for (int c = 0; c < channels_; ++c) {
              const bool on = (pattern >> c) & 1U;
              wa *= on ? p : 1.0 - p;
              if (on) act[static_cast<std::size_t>(c)] |= 1U << t;
            }
            if (wa > 0.0) next[{traj, act}] += w.weight * w_actions * wa;
          }
        };
        // Odometer over nodes' supported actions.
        std::vector<std::vector<Action>> support(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
          for (Action a = 0; a < na; ++a)
            if (kernels[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] > 0.0)
              support[static_cast<std::size_t>(i)].push_back(a);
        std::vector<std::size_t> pos(static_cast<std::size_t>(n), 0);
        for (;;) {
          double wp = 1.0;
          for (int i = 0; i < n; ++i) {
            choice[static_cast<std::size_t>(i)] = support[static_cast<std::size_t>(i)][pos[static_cast<std::size_t>(i)]];
            wp *= kernels[static_cast<std::size_t>(i)][static_cast<std::size_t>(choice[static_cast<std::size_t>(i)])];
          }
          emit_profile(wp);
          int i = 0;
          for (; i < n; ++i) {
            if (++pos[static_cast<std::size_t>(i)] < support[static_cast<std::size_t>(i)].size()) break;
            pos[static_cast<std::size_t>(i)] = 0;
          }
          if (i == n) break;
        }
      }
      worlds_[v].clear();
      for (auto& [k, w] : next) worlds_[v].push_back(World{k.first, k.second, w});
      total_worlds += worlds_[v].size();
      if (total_worlds > options_.max_worlds)
        throw BudgetError("oracle world count exceeds " + std::to_string(options_.max_worlds));
    }
  }
}

double Oracle::error_probability(int node, int t) const {
  if (t < 0 || t > t_max_) throw ConfigError("round beyond the unrolled horizon");
  if (model_.num_actions() != model_.num_states())
    throw ConfigError("error probability needs the action set to equal the state set");
  const int ns = model_.num_states();
  const Radix actions(model_.num_actions(), t_max_ + 1);
  CompensatedSum total;
  for (State s = 0; s < ns; ++s) {
    CompensatedSum given;
    for (std::uint64_t v = 0; v < vectors_; ++v) {
      double pv = 1.0;
      for (int i = 0; i < graph_.size(); ++i) pv *= model_.signals.likelihood(signal_of(v, i), s);
      if (pv == 0.0) continue;
      for (const World& w : worlds_[v])
        if (actions.digit(w.traj[static_cast<std::size_t>(node)], t) != s) given.add(pv * w.weight);
    }
    total.add(model_.signals.prior(s) * given.value());
  }
  return total.value();
}

std::vector<std::uint64_t> Oracle::feasible_set(int node, Signal x,
                                                std::span<const Code> observed,
                                                int rounds) const {
  if (rounds < 0 || rounds > t_max_ + 1) throw ConfigError("rounds beyond the unrolled horizon");
  if (observed.size() != graph_.observed(node).size())
    throw ConfigError("one observed trajectory per neighbor is required");
  std::vector<std::uint64_t> out;
  const auto nbrs = graph_.observed(node);
  for (std::uint64_t v = 0; v < vectors_; ++v) {
    if (signal_of(v, node) != x) continue;
    for (const World& w : worlds_[v]) {
      bool match = w.weight > 0.0;
      for (std::size_t m = 0; m < nbrs.size() && match; ++m)
        match = observed_code(w, node, nbrs[m], rounds) == observed[m];
      if (match) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

const std::map<Oracle::Key, ActionKernel>& Oracle::decisions(int node, int t) const {
  if (t < 0 || t > t_max_) throw ConfigError("round beyond the unrolled horizon");
  return decisions_[static_cast<std::size_t>(t)][static_cast<std::size_t>(node)];
}

const std::map<Oracle::Key, std::vector<double>>& Oracle::posteriors(int node, int t) const {
  if (t < 0 || t > t_max_) throw ConfigError("round beyond the unrolled horizon");
  return posteriors_[static_cast<std::size_t>(t)][static_cast<std::size_t>(node)];
}

std::uint64_t Oracle::world_count() const {
  std::uint64_t c = 0;
  for (const auto& w : worlds_) c += w.size();
  return c;
}

}  // namespace bsl
