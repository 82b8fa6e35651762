#include "bsl/trees.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <set>

namespace bsl {

DegreeDistribution::DegreeDistribution(std::vector<int> support, std::vector<double> probs) {
  if (support.empty() || support.size() != probs.size())
    throw ConfigError("degree distribution needs matching support and probabilities");
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return support[a] < support[b]; });
  double total = 0.0;
  for (std::size_t k : order) {
    if (support[k] < 0) throw ConfigError("negative degree");
    if (!(probs[k] >= 0.0)) throw ConfigError("negative degree probability");
    if (!support_.empty() && support_.back() == support[k])
      throw ConfigError("duplicate degree in support");
    support_.push_back(support[k]);
    probs_.push_back(probs[k]);
    total += probs[k];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("degree probabilities must sum to 1");
}

double DegreeDistribution::prob(int degree) const {
  for (std::size_t k = 0; k < support_.size(); ++k)
    if (support_[k] == degree) return probs_[k];
  return 0.0;
}

double DegreeDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) m += support_[k] * probs_[k];
  return m;
}

DegreeDistribution edge_perspective(const DegreeDistribution& rho_v) {
  const double norm = rho_v.mean();
  if (!(norm > 0.0)) throw ConfigError("edge perspective undefined: all mass on degree 0");
  std::vector<int> support;
  std::vector<double> probs;
  for (std::size_t k = 0; k < rho_v.support().size(); ++k) {
    const double w = rho_v.support()[k] * rho_v.probs()[k];
    if (w > 0.0) {
      support.push_back(rho_v.support()[k]);
      probs.push_back(w / norm);
    }
  }
  // Absorb rounding so the result validates.
  double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  probs.back() += 1.0 - total;
  return {support, probs};
}

Graph::Graph(int n, std::vector<Edge> edges, std::vector<Edge> directed_edges,
             std::vector<int> hubs)
    : observed_(static_cast<std::size_t>(n)),
      adjacent_(static_cast<std::size_t>(n)),
      edges_(std::move(edges)),
      directed_(std::move(directed_edges)),
      hubs_(std::move(hubs)) {
  if (n < 0) throw ConfigError("negative node count");
  auto check = [n](const Edge& e) {
    if (e.first < 0 || e.first >= n || e.second < 0 || e.second >= n)
      throw ConfigError("edge endpoint out of range");
    if (e.first == e.second) throw ConfigError("self-loops are not allowed");
  };
  for (const auto& e : edges_) {
    check(e);
    observed_[static_cast<std::size_t>(e.first)].push_back(e.second);
    observed_[static_cast<std::size_t>(e.second)].push_back(e.first);
  }
  for (const auto& e : directed_) {
    check(e);
    observed_[static_cast<std::size_t>(e.first)].push_back(e.second);
  }
  for (int i = 0; i < n; ++i) {
    auto& obs = observed_[static_cast<std::size_t>(i)];
    std::sort(obs.begin(), obs.end());
    if (std::adjacent_find(obs.begin(), obs.end()) != obs.end())
      throw ConfigError("duplicate edge at node " + std::to_string(i));
    for (int j : obs) {
      adjacent_[static_cast<std::size_t>(i)].push_back(j);
      adjacent_[static_cast<std::size_t>(j)].push_back(i);
    }
  }
  for (auto& adj : adjacent_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  std::sort(hubs_.begin(), hubs_.end());
  hubs_.erase(std::unique(hubs_.begin(), hubs_.end()), hubs_.end());
  for (int h : hubs_)
    if (h < 0 || h >= n) throw ConfigError("hub index out of range");
}

bool Graph::observes(int i, int j) const { return observed_slot(i, j) >= 0; }

int Graph::observed_slot(int i, int j) const {
  const auto& obs = observed_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(obs.begin(), obs.end(), j);
  if (it == obs.end() || *it != j) return -1;
  return static_cast<int>(it - obs.begin());
}

int Graph::max_degree() const {
  int d = 0;
  for (const auto& adj : adjacent_) d = std::max(d, static_cast<int>(adj.size()));
  return d;
}

bool Graph::is_hub(int i) const { return std::binary_search(hubs_.begin(), hubs_.end(), i); }

Diagnostic validate(const Graph& graph) {
  const int n = graph.size();
  for (int i = 0; i < n; ++i) {
    auto obs = graph.observed(i);
    if (!std::is_sorted(obs.begin(), obs.end()))
      return {false, "neighbor list of node " + std::to_string(i) + " is not sorted", {}};
  }
  // Find a cycle in the skeleton restricted to non-hub nodes by DFS.
  std::vector<int> parent(static_cast<std::size_t>(n), -2);
  for (int root = 0; root < n; ++root) {
    if (graph.is_hub(root) || parent[static_cast<std::size_t>(root)] != -2) continue;
    parent[static_cast<std::size_t>(root)] = -1;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : graph.neighbors(v)) {
        if (graph.is_hub(w) || w == parent[static_cast<std::size_t>(v)]) continue;
        if (parent[static_cast<std::size_t>(w)] == -2) {
          parent[static_cast<std::size_t>(w)] = v;
          stack.push_back(w);
          continue;
        }
        // Non-tree edge v-w closes a cycle: join the two root paths.
        std::vector<int> pv{v}, pw{w};
        while (parent[static_cast<std::size_t>(pv.back())] >= 0)
          pv.push_back(parent[static_cast<std::size_t>(pv.back())]);
        while (parent[static_cast<std::size_t>(pw.back())] >= 0)
          pw.push_back(parent[static_cast<std::size_t>(pw.back())]);
        while (pv.size() > 1 && pw.size() > 1 && pv[pv.size() - 2] == pw[pw.size() - 2]) {
          pv.pop_back();
          pw.pop_back();
        }
        std::vector<int> cycle(pv.begin(), pv.end());
        for (auto it = pw.rbegin() + 1; it != pw.rend(); ++it) cycle.push_back(*it);
        std::string msg = "cycle of length " + std::to_string(cycle.size()) + ":";
        for (int c : cycle) msg += " " + std::to_string(c);
        return {false, msg, cycle};
      }
    }
  }
  return {};
}

std::vector<int> distances(const Graph& graph, int source) {
  std::vector<int> dist(static_cast<std::size_t>(graph.size()), -1);
  std::deque<int> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : graph.neighbors(v))
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

std::vector<int> ball(const Graph& graph, int i, int t) {
  if (t < 0) throw ConfigError("ball radius must be non-negative");
  if (i < 0 || i >= graph.size()) throw ConfigError("node out of range");
  const auto dist = distances(graph, i);
  std::vector<int> out;
  for (int v = 0; v < graph.size(); ++v)
    if (dist[static_cast<std::size_t>(v)] >= 0 && dist[static_cast<std::size_t>(v)] <= t)
      out.push_back(v);
  return out;
}

Subtree directed_subtree(const Graph& graph, int j, int i) {
  if (std::find(graph.neighbors(i).begin(), graph.neighbors(i).end(), j) ==
      graph.neighbors(i).end())
    throw ConfigError("directed_subtree: (i, j) is not an edge");
  std::vector<int> label(static_cast<std::size_t>(graph.size()), -1);
  Subtree out;
  out.original.push_back(j);
  label[static_cast<std::size_t>(j)] = 0;
  std::deque<int> queue{j};
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : graph.neighbors(v)) {
      if ((v == j && w == i) || label[static_cast<std::size_t>(w)] >= 0) continue;
      if (w == i) throw ConfigError("directed_subtree: graph is not a tree");
      label[static_cast<std::size_t>(w)] = static_cast<int>(out.original.size());
      out.original.push_back(w);
      queue.push_back(w);
    }
  }
  auto relabel = [&](const std::vector<Edge>& in) {
    std::vector<Edge> e;
    for (const auto& [a, b] : in)
      if (label[static_cast<std::size_t>(a)] >= 0 && label[static_cast<std::size_t>(b)] >= 0)
        e.emplace_back(label[static_cast<std::size_t>(a)], label[static_cast<std::size_t>(b)]);
    return e;
  };
  std::vector<int> hubs;
  for (int h : graph.hubs())
    if (label[static_cast<std::size_t>(h)] >= 0) hubs.push_back(label[static_cast<std::size_t>(h)]);
  out.graph = Graph(static_cast<int>(out.original.size()), relabel(graph.edges()),
                    relabel(graph.directed_edges()), hubs);
  return out;
}

int tree_ball_radius(const Graph& graph, int i) {
  const auto dist = distances(graph, i);
  int max_dist = 0;
  for (int d : dist) max_dist = std::max(max_dist, d);
  // Count nodes and induced edges per radius.
  std::vector<long> nodes_at(static_cast<std::size_t>(max_dist) + 1, 0);
  std::vector<long> edges_closed_at(static_cast<std::size_t>(max_dist) + 1, 0);
  for (int v = 0; v < graph.size(); ++v) {
    const int dv = dist[static_cast<std::size_t>(v)];
    if (dv < 0) continue;
    ++nodes_at[static_cast<std::size_t>(dv)];
    for (int w : graph.neighbors(v)) {
      if (w < v) continue;
      const int dw = dist[static_cast<std::size_t>(w)];
      ++edges_closed_at[static_cast<std::size_t>(std::max(dv, dw))];
    }
  }
  long n = 0, e = 0;
  for (int t = 0; t <= max_dist; ++t) {
    n += nodes_at[static_cast<std::size_t>(t)];
    e += edges_closed_at[static_cast<std::size_t>(t)];
    if (e != n - 1) return t - 1;
  }
  return kUnboundedRadius;
}

Graph path_graph(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, e);
}

Graph star_graph(int leaves) {
  std::vector<Edge> e;
  for (int l = 1; l <= leaves; ++l) e.emplace_back(0, l);
  return Graph(leaves + 1, e);
}

Graph regular_tree(int d, int depth) {
  if (d < 1 || depth < 0) throw ConfigError("regular_tree needs d >= 1 and depth >= 0");
  std::vector<Edge> e;
  std::vector<int> frontier{0};
  int next = 1;
  for (int level = 0; level < depth; ++level) {
    std::vector<int> grown;
    for (int v : frontier) {
      const int children = v == 0 ? d : d - 1;
      for (int c = 0; c < children; ++c) {
        e.emplace_back(v, next);
        grown.push_back(next++);
      }
    }
    frontier = std::move(grown);
  }
  return Graph(next, e);
}

Graph binary_tree(int depth) {
  std::vector<Edge> e;
  const int n = (1 << (depth + 1)) - 1;
  for (int v = 1; v < n; ++v) e.emplace_back((v - 1) / 2, v);
  return Graph(n, e);
}

namespace {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r;
  do r = rng();
  while (r >= limit);
  return r % bound;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

ConfigurationSample sample_configuration_graph(const DegreeDistribution& rho_v, int n,
                                               std::uint64_t seed, int retry_budget) {
  if (n < 1) throw ConfigError("configuration model needs n >= 1");
  std::mt19937_64 rng(seed);
  std::vector<int> degree(static_cast<std::size_t>(n));
  bool even = false;
  for (int attempt = 0; attempt < retry_budget && !even; ++attempt) {
    long total = 0;
    for (auto& d : degree) {
      double u = uniform01(rng);
      std::size_t k = 0;
      while (k + 1 < rho_v.probs().size() && u >= rho_v.probs()[k]) u -= rho_v.probs()[k++];
      d = rho_v.support()[k];
      total += d;
    }
    even = total % 2 == 0;
  }
  if (!even) throw BudgetError("configuration model: no even degree sum within retry budget");

  std::vector<int> stubs;
  for (int v = 0; v < n; ++v)
    for (int k = 0; k < degree[static_cast<std::size_t>(v)]; ++k) stubs.push_back(v);

  for (int attempt = 1; attempt <= retry_budget; ++attempt) {
    for (std::size_t k = stubs.size(); k > 1; --k)
      std::swap(stubs[k - 1], stubs[uniform_below(rng, k)]);
    std::set<Edge> seen;
    bool simple = true;
    for (std::size_t k = 0; k + 1 < stubs.size() && simple; k += 2) {
      int a = stubs[k], b = stubs[k + 1];
      if (a == b) {
        simple = false;
        break;
      }
      if (a > b) std::swap(a, b);
      simple = seen.insert({a, b}).second;
    }
    if (!simple) continue;
    ConfigurationSample out;
    out.graph = Graph(n, std::vector<Edge>(seen.begin(), seen.end()));
    out.attempts = attempt;
    out.tree_radius.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
      out.tree_radius[static_cast<std::size_t>(v)] = tree_ball_radius(out.graph, v);
    return out;
  }
  throw BudgetError("configuration model: retry budget exhausted");
}

}  // namespace bsl
