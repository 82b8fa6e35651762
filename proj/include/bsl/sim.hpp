#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bsl/ensemble_engine.hpp"
#include "bsl/graph_engine.hpp"
#include "bsl/trees.hpp"

namespace bsl {

/// Decision table for (node, round), or nullptr when there is none.
using TableLookup = std::function<const TrajectoryTable*(int node, int round)>;

TableLookup tables_from(const GraphEngine& engine);
/// Homogeneous tables chosen by each node's number of observed neighbors.
TableLookup tables_from(const EnsembleEngine& engine, const Graph& graph);

struct SimConfig {
  int rounds = 0;
  std::uint64_t samples = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  /// When non-empty, only nodes within `rounds` of a focus node are
  /// simulated, each through the last round that can reach a focus node.
  std::vector<int> focus;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::string graph;
  std::string rule;
  std::string model_hash;
  std::vector<std::vector<std::uint64_t>> errors;   ///< [node][round]
  std::vector<std::vector<std::uint64_t>> samples;  ///< [node][round]

  double rate(int node, int t) const;
  /// sqrt(p (1 - p) / N) at probability p.
  double standard_error(int node, int t, double p) const;
};

/// Counter-based stream: a uniform double in [0, 1) for each key.
double uniform_at(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Samples s and the signals, then plays the rounds synchronously. Actions
/// come from `tables` when given; otherwise the rule is evaluated directly
/// (Bayesian rules need tables).
RunResult simulate(const Graph& graph, const AgentModel& model, const UpdateRule& rule,
                   const TableLookup& tables, const SimConfig& config);

/// Nodes whose radius-t ball is a tree in which every node closer than t
/// has degree d.
std::vector<int> interior_nodes(const Graph& graph, int d, int t);

}  // namespace bsl
