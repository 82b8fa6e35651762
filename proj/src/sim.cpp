#include "bsl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsl/numeric.hpp"

namespace bsl {

TableLookup tables_from(const GraphEngine& engine) {
  return [&engine](int node, int t) -> const TrajectoryTable* {
    if (t > engine.horizon()) return nullptr;
    return &engine.decision(node, t);
  };
}

TableLookup tables_from(const EnsembleEngine& engine, const Graph& graph) {
  return [&engine, &graph](int node, int t) -> const TrajectoryTable* {
    const int k = static_cast<int>(graph.observed(node).size());
    if (t > engine.horizon() || !engine.has_degree(k)) return nullptr;
    return &engine.decision(k, t);
  };
}

double RunResult::rate(int node, int t) const {
  const auto n = samples[static_cast<std::size_t>(node)][static_cast<std::size_t>(t)];
  if (n == 0) throw ConfigError("no samples for this node and round");
  return static_cast<double>(errors[static_cast<std::size_t>(node)][static_cast<std::size_t>(t)]) /
         static_cast<double>(n);
}

double RunResult::standard_error(int node, int t, double p) const {
  const auto n = samples[static_cast<std::size_t>(node)][static_cast<std::size_t>(t)];
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class Probs>
int draw(double u, int n, Probs&& prob) {
  for (int k = 0; k < n - 1; ++k) {
    const double p = prob(k);
    if (u < p) return k;
    u -= p;
  }
  return n - 1;
}

// Stream keys for the state and the signals; rounds use their own index.
constexpr std::uint64_t kStateKey = ~std::uint64_t{0};
constexpr std::uint64_t kSignalRound = ~std::uint64_t{0};

}  // namespace

double uniform_at(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ a);
  h = splitmix(h ^ b);
  h = splitmix(h ^ c);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

RunResult simulate(const Graph& graph, const AgentModel& model, const UpdateRule& rule,
                   const TableLookup& tables, const SimConfig& config) {
  model.validate();
  const int n = graph.size();
  const int T = config.rounds;
  const int na = model.num_actions();
  if (T < 0) throw ConfigError("rounds must be non-negative");
  if (!tables && rule.kind == RuleKind::Bayesian)
    throw ConfigError("Bayesian simulation needs decision tables");
  if (model.num_actions() != model.num_states())
    throw ConfigError("error tallies need the action set to equal the state set");

  // Last round simulated for every node.
  std::vector<int> last(static_cast<std::size_t>(n), T);
  if (!config.focus.empty()) {
    std::fill(last.begin(), last.end(), -1);
    for (int f : config.focus) {
      if (f < 0 || f >= n) throw ConfigError("focus node out of range");
      const auto dist = distances(graph, f);
      for (int u = 0; u < n; ++u) {
        const int du = dist[static_cast<std::size_t>(u)];
        if (du >= 0 && du <= T) last[static_cast<std::size_t>(u)] = std::max(last[static_cast<std::size_t>(u)], T - du);
      }
    }
  }
  std::vector<int> active;
  for (int u = 0; u < n; ++u)
    if (last[static_cast<std::size_t>(u)] >= 0) active.push_back(u);

  // Tables and deciders are fixed up front so a mismatch fails before sampling.
  std::vector<std::vector<const TrajectoryTable*>> table(static_cast<std::size_t>(n));
  if (tables)
    for (int u : active)
      for (int t = 0; t <= last[static_cast<std::size_t>(u)]; ++t) {
        const TrajectoryTable* g = tables(u, t);
        if (g == nullptr)
          throw ConfigError("missing decision table for node " + std::to_string(u) + " at round " +
                            std::to_string(t));
        if (g->num_neighbors() != static_cast<int>(graph.observed(u).size()) ||
            g->obs_alphabet() != na || g->horizon() != t)
          throw ConfigError("decision table does not match node " + std::to_string(u));
        table[static_cast<std::size_t>(u)].push_back(g);
      }
  std::vector<RoundDecider> deciders;
  if (!tables)
    for (int t = 0; t <= T; ++t) deciders.emplace_back(model, rule, t, na);

  RunResult result;
  result.seed = config.seed;
  result.rule = to_string(rule.kind);
  result.errors.assign(static_cast<std::size_t>(n), std::vector<std::uint64_t>(static_cast<std::size_t>(T) + 1, 0));
  result.samples = result.errors;

  const Radix actions(na, T + 1);
  std::vector<RunResult> partial(static_cast<std::size_t>(std::max(1, config.threads)), result);
  parallel_chunks(partial.size(), static_cast<int>(partial.size()), [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      RunResult& tally = partial[c];
      const std::uint64_t begin = config.samples * c / partial.size();
      const std::uint64_t end = config.samples * (c + 1) / partial.size();
      std::vector<Signal> x(static_cast<std::size_t>(n));
      std::vector<Code> traj(static_cast<std::size_t>(n));
      std::vector<Action> next(static_cast<std::size_t>(n));
      std::vector<Code> inputs;
      for (std::uint64_t k = begin; k < end; ++k) {
        const State s = draw(uniform_at(config.seed, k, kStateKey, kStateKey), model.num_states(),
                             [&](int q) { return model.signals.prior(q); });
        for (int u : active) {
          x[static_cast<std::size_t>(u)] =
              draw(uniform_at(config.seed, k, static_cast<std::uint64_t>(u), kSignalRound),
                   model.num_signals(), [&](int q) { return model.signals.likelihood(q, s); });
          traj[static_cast<std::size_t>(u)] = 0;
        }
        for (int t = 0; t <= T; ++t) {
          for (int u : active) {
            if (last[static_cast<std::size_t>(u)] < t) continue;
            const auto obs = graph.observed(u);
            inputs.resize(obs.size());
            for (std::size_t m = 0; m < obs.size(); ++m)
              inputs[m] = static_cast<Code>(actions.prefix(traj[static_cast<std::size_t>(obs[m])], t));
            const Signal xu = x[static_cast<std::size_t>(u)];
            const Code own = traj[static_cast<std::size_t>(u)];
            const double r = uniform_at(config.seed, k, static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(t));
            Action a = 0;
            if (tables) {
              const TrajectoryTable& g = *table[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)];
              const std::uint64_t idx = g.index(xu, inputs);
              if (g.deterministic()) {
                a = actions.digit(g.code(idx), t);
              } else {
                std::vector<double> weight(static_cast<std::size_t>(na), 0.0);
                g.for_each(idx, [&](Code c, double p) {
                  if (actions.prefix(c, t) == own) weight[static_cast<std::size_t>(actions.digit(c, t))] += p;
                });
                double total = 0.0;
                for (double w : weight) total += w;
                if (!(total > 0.0))
                  throw InvariantError("decision table has no entry for the played trajectory");
                a = draw(r, na, [&](int q) { return weight[static_cast<std::size_t>(q)] / total; });
              }
            } else {
              const ActionKernel kern = deciders[static_cast<std::size_t>(t)].decide(
                  xu, inputs, own, [](State) { return 1.0; });
              a = draw(r, na, [&](int q) { return kern[static_cast<std::size_t>(q)]; });
            }
            next[static_cast<std::size_t>(u)] = a;
            ++tally.samples[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)];
            if (a != s) ++tally.errors[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)];
          }
          for (int u : active)
            if (last[static_cast<std::size_t>(u)] >= t)
              traj[static_cast<std::size_t>(u)] +=
                  static_cast<Code>(static_cast<std::uint64_t>(next[static_cast<std::size_t>(u)]) * actions.pow(t));
        }
      }
    }
  });
  for (const RunResult& p : partial)
    for (int u = 0; u < n; ++u)
      for (int t = 0; t <= T; ++t) {
        result.errors[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)] += p.errors[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)];
        result.samples[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)] += p.samples[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)];
      }
  return result;
}

std::vector<int> interior_nodes(const Graph& graph, int d, int t) {
  std::vector<int> out;
  for (int i = 0; i < graph.size(); ++i) {
    if (t > 0 && tree_ball_radius(graph, i) < t) continue;
    const auto dist = distances(graph, i);
    bool regular = true;
    for (int u = 0; u < graph.size() && regular; ++u) {
      const int du = dist[static_cast<std::size_t>(u)];
      if (du >= 0 && du < t) regular = graph.degree(u) == d;
    }
    if (regular) out.push_back(i);
  }
  return out;
}

}  // namespace bsl
