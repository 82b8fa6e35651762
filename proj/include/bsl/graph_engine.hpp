#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bsl/cavity.hpp"
#include "bsl/ensemble_engine.hpp"
#include "bsl/trees.hpp"

namespace bsl {

struct GraphEngineOptions {
  EngineOptions engine;
  /// Most hubs allowed within distance t of a node at round t.
  int hub_cap = 4;
  /// Most terms enumerated when conditioning on hub trajectories.
  std::uint64_t enumeration_budget = 200'000'000;
};

/// Exact recursion on a finite graph: one message per observation (j -> i)
/// and one decision table per node. Nodes near hubs condition on the
/// trajectories of a cut set (the nearby hubs, grown until every remaining
/// piece of the graph touches it at a single node) and sum those out.
class GraphEngine {
 public:
  GraphEngine(Graph graph, AgentModel model, UpdateRule rule, GraphEngineOptions options = {});

  int horizon() const { return horizon_; }
  void advance();
  void advance_to(int t);

  const Graph& graph() const { return graph_; }
  const AgentModel& model() const { return model_; }
  const UpdateRule& rule() const { return rule_; }

  const TrajectoryTable& decision(int node, int t) const;
  /// Q_{j -> i} at horizon h; i must observe j.
  const CavityTable& message(int j, int i, int h) const;

  ErrorReport error_report(int node, int t) const;
  double error_probability(int node, int t) const { return error_report(node, t).error; }

  /// Probability of the observed codes (through t-1) under state s given the
  /// node's own trajectory prefix (through t-2), with the node as a zombie.
  double observation_weight(int node, int t, State s, std::span<const Code> observed,
                            Code own_prefix) const;

  /// Posterior for a deterministic rule; the own trajectory is looked up.
  std::vector<double> posterior(int node, Signal x, std::span<const Code> observed, int t) const;

  /// Cut set used for `node` at round t (always contains the node itself).
  std::vector<int> conditioning_set(int node, int t) const;

  const std::vector<StepReport>& steps() const { return steps_; }

 private:
  struct HubWeights;

  int edge_id(int observer, int observed) const;
  void compute_messages(int h);
  void build_decisions(int t);
  std::shared_ptr<const HubWeights> hub_weights(int node, int t) const;

  Graph graph_;
  AgentModel model_;
  UpdateRule rule_;
  GraphEngineOptions options_;
  int horizon_ = 0;
  std::vector<std::size_t> edge_offset_;
  std::vector<std::vector<CavityTable>> messages_;       // [h][edge]
  std::vector<std::vector<TrajectoryTable>> decisions_;  // [node][t]
  std::vector<std::vector<std::shared_ptr<const HubWeights>>> hub_cache_;  // [node][t]
  std::vector<StepReport> steps_;
};

}  // namespace bsl
