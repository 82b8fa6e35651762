#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bsl/error.hpp"

namespace bsl {

/// Degree law with finite support, sorted by degree.
class DegreeDistribution {
 public:
  DegreeDistribution(std::vector<int> support, std::vector<double> probs);
  static DegreeDistribution single(int degree) { return {{degree}, {1.0}}; }

  const std::vector<int>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  /// Probability of `degree` (0 outside the support).
  double prob(int degree) const;
  double mean() const;
  int max_degree() const { return support_.back(); }

 private:
  std::vector<int> support_;
  std::vector<double> probs_;
};

/// Degree law of a node reached along a uniformly random edge:
/// rho_E(d) = d rho_V(d) / sum_d' d' rho_V(d'). Zero-probability degrees are dropped.
DegreeDistribution edge_perspective(const DegreeDistribution& rho_v);

using Edge = std::pair<int, int>;

/// Finite social graph. An undirected edge lets both endpoints observe each
/// other; a directed edge (i, j) lets i observe j only. Hubs are the nodes
/// whose removal leaves a forest. Immutable once built.
class Graph {
 public:
  Graph() = default;
  Graph(int n, std::vector<Edge> edges, std::vector<Edge> directed_edges = {},
        std::vector<int> hubs = {});

  int size() const { return static_cast<int>(observed_.size()); }
  /// Nodes that i observes, sorted (the canonical neighbor order).
  std::span<const int> observed(int i) const { return observed_[static_cast<std::size_t>(i)]; }
  /// Skeleton neighbors (either observation direction), sorted.
  std::span<const int> neighbors(int i) const { return adjacent_[static_cast<std::size_t>(i)]; }
  bool observes(int i, int j) const;
  int degree(int i) const { return static_cast<int>(adjacent_[static_cast<std::size_t>(i)].size()); }
  int max_degree() const;

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Edge>& directed_edges() const { return directed_; }
  const std::vector<int>& hubs() const { return hubs_; }
  bool is_hub(int i) const;

  /// Position of j in observed(i), or -1.
  int observed_slot(int i, int j) const;

 private:
  std::vector<std::vector<int>> observed_;
  std::vector<std::vector<int>> adjacent_;
  std::vector<Edge> edges_;
  std::vector<Edge> directed_;
  std::vector<int> hubs_;
};

struct Diagnostic {
  bool ok = true;
  std::string message;
  /// Nodes of an offending cycle, in order, when one was found.
  std::vector<int> cycle;
};

/// Checks the tree invariants: sorted neighbor lists and an acyclic skeleton
/// once the hubs are removed.
Diagnostic validate(const Graph& graph);

struct Subtree {
  Graph graph;            ///< relabeled; the root is node 0
  std::vector<int> original;  ///< original index of each relabeled node
};

/// j's component once edge (i, j) is removed, rooted at j.
Subtree directed_subtree(const Graph& graph, int j, int i);

/// Skeleton BFS distances from `source` (-1 if unreachable).
std::vector<int> distances(const Graph& graph, int source);

/// Nodes at skeleton distance <= t from i, sorted.
std::vector<int> ball(const Graph& graph, int i, int t);

inline constexpr int kUnboundedRadius = std::numeric_limits<int>::max();

/// Largest t with the induced ball B_i^t a tree; kUnboundedRadius when the
/// whole component of i is a tree.
int tree_ball_radius(const Graph& graph, int i);

Graph path_graph(int n);
/// Star with one center (node 0) and `leaves` leaves.
Graph star_graph(int leaves);
/// Finite d-regular tree: root of degree d, interior nodes of degree d,
/// leaves at distance `depth`. Nodes are numbered in BFS order.
Graph regular_tree(int d, int depth);
/// Complete binary tree of the given depth (root has 2 children).
Graph binary_tree(int depth);

struct ConfigurationSample {
  Graph graph;
  std::vector<int> tree_radius;
  int attempts = 0;
};

/// Configuration-model graph: degrees drawn i.i.d. from rho_v, half-edges
/// paired uniformly, pairings with self-loops or multi-edges rejected.
ConfigurationSample sample_configuration_graph(const DegreeDistribution& rho_v, int n,
                                               std::uint64_t seed, int retry_budget = 1000);

}  // namespace bsl
