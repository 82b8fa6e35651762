#include "bsl/graph_engine.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <string>

namespace bsl {

namespace {

struct CutPlan {
  std::vector<int> cut;  // includes the focal node
  /// Attachment node of every piece of G - cut that touches the cut at a
  /// single node.
  std::vector<int> attachments;
};

CutPlan plan_cut(const Graph& g, int v, int t, int hub_cap) {
  const int n = g.size();
  std::vector<char> in_cut(static_cast<std::size_t>(n), 0);
  in_cut[static_cast<std::size_t>(v)] = 1;
  const auto dist = distances(g, v);
  int hubs_near = 0;
  for (int h : g.hubs()) {
    const int dh = dist[static_cast<std::size_t>(h)];
    if (dh >= 0 && dh <= t && h != v) {
      in_cut[static_cast<std::size_t>(h)] = 1;
      ++hubs_near;
    }
  }
  if (hubs_near > hub_cap)
    throw BudgetError("node " + std::to_string(v) + " has " + std::to_string(hubs_near) +
                      " hubs within distance " + std::to_string(t) + " (cap " +
                      std::to_string(hub_cap) + ")");
  CutPlan plan;
  for (;;) {
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> attach;
    for (int r = 0; r < n; ++r) {
      if (in_cut[static_cast<std::size_t>(r)] || comp[static_cast<std::size_t>(r)] >= 0) continue;
      const int id = static_cast<int>(attach.size());
      attach.emplace_back();
      std::deque<int> queue{r};
      comp[static_cast<std::size_t>(r)] = id;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        bool touches = false;
        for (int w : g.neighbors(u)) {
          if (in_cut[static_cast<std::size_t>(w)]) {
            touches = true;
          } else if (comp[static_cast<std::size_t>(w)] < 0) {
            comp[static_cast<std::size_t>(w)] = id;
            queue.push_back(w);
          }
        }
        if (touches) attach.back().push_back(u);
      }
    }
    bool grown = false;
    for (const auto& a : attach)
      if (a.size() >= 2) {
        for (int u : a) in_cut[static_cast<std::size_t>(u)] = 1;
        grown = true;
      }
    if (!grown) {
      for (const auto& a : attach)
        if (a.size() == 1) plan.attachments.push_back(a.front());
      break;
    }
  }
  for (int u = 0; u < n; ++u)
    if (in_cut[static_cast<std::size_t>(u)]) plan.cut.push_back(u);
  std::sort(plan.attachments.begin(), plan.attachments.end());
  return plan;
}

}  // namespace

/// Observation weights of a node whose cut set is larger than itself,
/// tabulated as [s][own prefix][observed tuple].
struct GraphEngine::HubWeights {
  std::vector<int> cut;
  std::uint64_t own_count = 1;
  std::uint64_t tuple_count = 1;
  std::vector<double> values;

  double at(State s, Code own_prefix, std::uint64_t tuple) const {
    return values[(static_cast<std::uint64_t>(s) * own_count + own_prefix) * tuple_count + tuple];
  }
};

GraphEngine::GraphEngine(Graph graph, AgentModel model, UpdateRule rule,
                         GraphEngineOptions options)
    : graph_(std::move(graph)),
      model_(std::move(model)),
      rule_(std::move(rule)),
      options_(options) {
  model_.validate();
  const Diagnostic diag = validate(graph_);
  if (!diag.ok) throw ConfigError("graph is not a tree after removing hubs: " + diag.message);
  const int n = graph_.size();
  edge_offset_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i)
    edge_offset_[static_cast<std::size_t>(i) + 1] =
        edge_offset_[static_cast<std::size_t>(i)] + graph_.observed(i).size();
  decisions_.resize(static_cast<std::size_t>(n));
  hub_cache_.resize(static_cast<std::size_t>(n));
  build_decisions(0);
}

int GraphEngine::edge_id(int observer, int observed) const {
  const int slot = graph_.observed_slot(observer, observed);
  if (slot < 0)
    throw ConfigError("node " + std::to_string(observer) + " does not observe node " +
                      std::to_string(observed));
  return static_cast<int>(edge_offset_[static_cast<std::size_t>(observer)]) + slot;
}

void GraphEngine::compute_messages(int h) {
  const int na = model_.num_actions();
  const int ns = model_.num_states();
  const Radix actions(na, h + 1);
  const std::size_t edges = edge_offset_.back();
  std::vector<CavityTable> out(edges);
  StepReport rep;
  rep.horizon = h;
  std::vector<std::uint64_t> ops(edges, 0);
  parallel_chunks(static_cast<std::size_t>(graph_.size()), options_.engine.threads,
                  [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto observed = graph_.observed(static_cast<int>(i));
      for (std::size_t m = 0; m < observed.size(); ++m) {
        const int j = observed[m];
        const std::size_t e = edge_offset_[i] + m;
        const auto& g = decisions_[static_cast<std::size_t>(j)][static_cast<std::size_t>(h)];
        const auto j_obs = graph_.observed(j);
        std::vector<SlotInput> slots(j_obs.size());
        int parent_slot = -1;
        for (std::size_t q = 0; q < j_obs.size(); ++q) {
          if (j_obs[q] == static_cast<int>(i)) {
            parent_slot = static_cast<int>(q);
          } else if (h > 0) {
            slots[q].message = &messages_[static_cast<std::size_t>(h - 1)]
                                         [static_cast<std::size_t>(edge_id(j, j_obs[q]))];
          }
        }
        CavityTable q(h, na, na, ns);
        std::vector<CompensatedSum> acc(q.sigma_count());
        const std::uint64_t taus = parent_slot >= 0 ? q.tau_count() : 1;
        for (State s = 0; s < ns; ++s)
          for (Code tau = 0; tau < taus; ++tau) {
            if (parent_slot >= 0) slots[static_cast<std::size_t>(parent_slot)].fixed = tau;
            std::fill(acc.begin(), acc.end(), CompensatedSum{});
            site_law(g, slots, s, model_.signals, actions, [&](Code sigma, double w) {
              ++ops[e];
              acc[sigma].add(w);
            });
            auto slice = q.slice(tau, s);
            for (std::size_t k = 0; k < acc.size(); ++k) slice[k] = acc[k].value();
          }
        if (parent_slot < 0)
          // j ignores i, so the law does not depend on the zombie.
          for (State s = 0; s < ns; ++s)
            for (Code tau = 1; tau < q.tau_count(); ++tau) {
              const auto src = q.slice(0, s);
              std::copy(src.begin(), src.end(), q.slice(tau, s).begin());
            }
        out[e] = std::move(q);
      }
    }
  });
  for (std::size_t e = 0; e < edges; ++e) {
    rep.operations += ops[e];
    rep.normalization_drift = std::max(rep.normalization_drift, out[e].normalization_error());
    if (h > 0)
      rep.marginalization_error =
          std::max(rep.marginalization_error,
                   out[e].marginalization_error(messages_[static_cast<std::size_t>(h - 1)][e]));
    if (options_.engine.renormalize) out[e].renormalize();
  }
  messages_.push_back(std::move(out));
  steps_.push_back(rep);
}

std::shared_ptr<const GraphEngine::HubWeights> GraphEngine::hub_weights(int v, int t) const {
  const auto& cache = hub_cache_[static_cast<std::size_t>(v)];
  if (t < static_cast<int>(cache.size())) return cache[static_cast<std::size_t>(t)];
  return nullptr;
}

std::vector<int> GraphEngine::conditioning_set(int node, int t) const {
  return plan_cut(graph_, node, t, options_.hub_cap).cut;
}

void GraphEngine::build_decisions(int t) {
  const int na = model_.num_actions();
  const int ns = model_.num_states();
  const int nx = model_.num_signals();
  std::uint64_t needed = 0;
  for (int v = 0; v < graph_.size(); ++v)
    needed += TrajectoryTable::estimate_bytes(t, static_cast<int>(graph_.observed(v).size()), nx,
                                              na);
  if (needed > options_.engine.memory_budget)
    throw BudgetError("decision tables for round " + std::to_string(t) + " need about " +
                      std::to_string(needed >> 20) + " MiB");

  for (int v = 0; v < graph_.size(); ++v) {
    auto& cache = hub_cache_[static_cast<std::size_t>(v)];
    cache.resize(static_cast<std::size_t>(t) + 1);
    if (t == 0) continue;
    const CutPlan plan = plan_cut(graph_, v, t, options_.hub_cap);
    if (plan.cut.size() == 1) continue;

    // Variables: the other cut nodes plus attachments someone in the cut observes.
    std::vector<char> in_cut(static_cast<std::size_t>(graph_.size()), 0);
    for (int z : plan.cut) in_cut[static_cast<std::size_t>(z)] = 1;
    std::vector<int> vars;
    for (int z : plan.cut)
      if (z != v) vars.push_back(z);
    std::vector<int> pieces;
    for (int b : plan.attachments) {
      bool needed_b = false;
      for (int z : plan.cut) needed_b = needed_b || graph_.observes(z, b);
      if (needed_b) {
        vars.push_back(b);
        pieces.push_back(b);
      }
    }
    std::vector<int> var_of(static_cast<std::size_t>(graph_.size()), -1);
    for (std::size_t k = 0; k < vars.size(); ++k) var_of[static_cast<std::size_t>(vars[k])] = static_cast<int>(k);
    for (int j : graph_.observed(v))
      if (var_of[static_cast<std::size_t>(j)] < 0)
        throw InvariantError("observed neighbor outside the cut-set variables");

    const Radix actions(na, t + 1);
    const std::uint64_t span = actions.pow(t);       // trajectories through t-1
    const std::uint64_t own_count = actions.pow(t - 1);
    const std::uint64_t trunc = actions.pow(t - 1);  // through t-2
    auto hw = std::make_shared<HubWeights>();
    hw->cut = plan.cut;
    hw->own_count = own_count;
    const auto v_obs = graph_.observed(v);
    hw->tuple_count = checked_pow(span, static_cast<int>(v_obs.size()), UINT32_MAX);
    const std::uint64_t assignments =
        checked_pow(span, static_cast<int>(vars.size()), UINT64_MAX / 1024);
    const std::uint64_t total = assignments * own_count * static_cast<std::uint64_t>(ns);
    if (total > options_.enumeration_budget)
      throw BudgetError("cut set of node " + std::to_string(v) + " at round " +
                        std::to_string(t) + " needs " + std::to_string(total) +
                        " terms, over the enumeration budget");

    std::vector<CompensatedSum> acc(static_cast<std::size_t>(ns) * own_count * hw->tuple_count);
    const int h = t - 1;  // horizon of everything enumerated
    std::vector<Code> code(vars.size(), 0);
    std::vector<Code> inputs;
    std::vector<std::map<std::vector<Code>, std::vector<double>>> piece_cache(pieces.size());

    auto code_of = [&](int u, Code own_prefix) -> Code {
      if (u == v) return own_prefix;
      return static_cast<Code>(code[static_cast<std::size_t>(var_of[static_cast<std::size_t>(u)])] % trunc);
    };

    for (State s = 0; s < ns; ++s) {
      for (auto& m : piece_cache) m.clear();
      for (Code own = 0; own < own_count; ++own) {
        std::fill(code.begin(), code.end(), 0);
        for (;;) {
          double w = 1.0;
          for (std::size_t k = 0; k < vars.size() && w != 0.0; ++k) {
            const int z = vars[k];
            if (!in_cut[static_cast<std::size_t>(z)]) continue;
            const auto& g = decisions_[static_cast<std::size_t>(z)][static_cast<std::size_t>(h)];
            const auto z_obs = graph_.observed(z);
            inputs.resize(z_obs.size());
            for (std::size_t q = 0; q < z_obs.size(); ++q) inputs[q] = code_of(z_obs[q], own);
            double f = 0.0;
            for (Signal x = 0; x < nx; ++x) {
              const double px = model_.signals.likelihood(x, s);
              if (px > 0.0) f += px * g.prob(g.index(x, inputs), code[k]);
            }
            w *= f;
          }
          for (std::size_t p = 0; p < pieces.size() && w != 0.0; ++p) {
            const int b = pieces[p];
            const auto b_obs = graph_.observed(b);
            std::vector<Code> key;
            for (int l : b_obs)
              if (in_cut[static_cast<std::size_t>(l)]) key.push_back(code_of(l, own));
            auto it = piece_cache[p].find(key);
            if (it == piece_cache[p].end()) {
              std::vector<SlotInput> slots(b_obs.size());
              std::size_t fixed_k = 0;
              for (std::size_t q = 0; q < b_obs.size(); ++q) {
                if (in_cut[static_cast<std::size_t>(b_obs[q])])
                  slots[q].fixed = key[fixed_k++];
                else if (h > 0)
                  slots[q].message = &messages_[static_cast<std::size_t>(h - 1)]
                                               [static_cast<std::size_t>(edge_id(b, b_obs[q]))];
              }
              std::vector<CompensatedSum> law(span);
              site_law(decisions_[static_cast<std::size_t>(b)][static_cast<std::size_t>(h)], slots,
                       s, model_.signals, actions, [&](Code sigma, double pw) { law[sigma].add(pw); });
              std::vector<double> values(span);
              for (std::size_t k = 0; k < span; ++k) values[k] = law[k].value();
              it = piece_cache[p].emplace(std::move(key), std::move(values)).first;
            }
            w *= it->second[code[static_cast<std::size_t>(var_of[static_cast<std::size_t>(b)])]];
          }
          if (w != 0.0) {
            std::uint64_t tuple = 0;
            for (std::size_t m = v_obs.size(); m-- > 0;)
              tuple = tuple * span + code[static_cast<std::size_t>(var_of[static_cast<std::size_t>(v_obs[m])])];
            acc[(static_cast<std::uint64_t>(s) * own_count + own) * hw->tuple_count + tuple].add(w);
          }
          std::size_t k = 0;
          for (; k < code.size(); ++k) {
            if (++code[k] < span) break;
            code[k] = 0;
          }
          if (k == code.size()) break;
        }
      }
    }
    hw->values.resize(acc.size());
    for (std::size_t k = 0; k < acc.size(); ++k) hw->values[k] = acc[k].value();
    cache[static_cast<std::size_t>(t)] = std::move(hw);
  }

  for (int v = 0; v < graph_.size(); ++v) {
    auto& tables = decisions_[static_cast<std::size_t>(v)];
    const TrajectoryTable* prev = t > 0 ? &tables.back() : nullptr;
    tables.push_back(build_trajectory_table(
        prev, static_cast<int>(graph_.observed(v).size()), t, model_, rule_, na,
        [&](State s, Signal, std::span<const Code> observed, Code own_prefix) {
          return observation_weight(v, t, s, observed, own_prefix);
        }));
  }
}

double GraphEngine::observation_weight(int node, int t, State s, std::span<const Code> observed,
                                       Code own_prefix) const {
  if (t == 0) return 1.0;
  if (auto hw = hub_weights(node, t)) {
    const std::uint64_t span = Radix(model_.num_actions(), t).pow(t);
    std::uint64_t tuple = 0;
    for (std::size_t m = observed.size(); m-- > 0;) tuple = tuple * span + observed[m];
    return hw->at(s, own_prefix, tuple);
  }
  const auto obs = graph_.observed(node);
  double w = 1.0;
  for (std::size_t m = 0; m < obs.size() && w != 0.0; ++m)
    w *= messages_[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(edge_id(node, obs[m]))](
        observed[m], own_prefix, s);
  return w;
}

void GraphEngine::advance() {
  const auto start = std::chrono::steady_clock::now();
  compute_messages(horizon_);
  build_decisions(horizon_ + 1);
  ++horizon_;
  steps_.back().seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void GraphEngine::advance_to(int t) {
  while (horizon_ < t) advance();
}

const TrajectoryTable& GraphEngine::decision(int node, int t) const {
  if (node < 0 || node >= graph_.size()) throw ConfigError("node out of range");
  if (t < 0 || t > horizon_)
    throw ConfigError("round " + std::to_string(t) + " beyond the computed horizon");
  return decisions_[static_cast<std::size_t>(node)][static_cast<std::size_t>(t)];
}

const CavityTable& GraphEngine::message(int j, int i, int h) const {
  if (h < 0 || h >= static_cast<int>(messages_.size()))
    throw ConfigError("message horizon " + std::to_string(h) + " not computed");
  return messages_[static_cast<std::size_t>(h)][static_cast<std::size_t>(edge_id(i, j))];
}

ErrorReport GraphEngine::error_report(int node, int t) const {
  return site_error(decision(node, t), model_,
                    [&](State s, Signal, std::span<const Code> observed, Code own_prefix) {
                      return observation_weight(node, t, s, observed, own_prefix);
                    });
}

std::vector<double> GraphEngine::posterior(int node, Signal x, std::span<const Code> observed,
                                           int t) const {
  if (t == 0) return signal_posterior(model_.signals, x);
  const TrajectoryTable& g = decision(node, t - 1);
  if (!g.deterministic()) throw ConfigError("posterior lookup needs a deterministic rule");
  if (observed.size() != graph_.observed(node).size())
    throw ConfigError("one observed trajectory per neighbor is required");
  const Radix actions(model_.num_actions(), t + 1);
  std::vector<Code> truncated(observed.begin(), observed.end());
  for (auto& c : truncated) c = static_cast<Code>(actions.prefix(c, t - 1));
  const Code own = g.code(g.index(x, truncated));
  const Code own_prefix = static_cast<Code>(actions.prefix(own, t - 1));
  std::vector<double> post(static_cast<std::size_t>(model_.num_states()));
  for (State s = 0; s < model_.num_states(); ++s)
    post[static_cast<std::size_t>(s)] = model_.signals.prior(s) * model_.signals.likelihood(x, s) *
                                        observation_weight(node, t, s, observed, own_prefix);
  normalize(post, "posterior (observation impossible under every state)");
  return post;
}

}  // namespace bsl
