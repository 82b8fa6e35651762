#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bsl/model.hpp"
#include "bsl/trees.hpp"

namespace bsl {

struct OracleOptions {
  /// Guard on n * t_max * |X|^n.
  std::uint64_t budget = 1'000'000'000;
  /// Guard on the total number of (signal vector, world) pairs.
  std::uint64_t max_worlds = 20'000'000;
  /// Edge activation probability; below 1 observations use an extra
  /// "inactive" symbol with index |A|.
  double activation = 1.0;
};

/// Brute-force forward simulation of every agent for every private signal
/// vector. Stochastic decisions and edge activations branch into weighted
/// worlds; identical worlds are merged. Works on any graph.
class Oracle {
 public:
  /// Key of a decision: [x, observed codes through t-1..., own code through t-1].
  using Key = std::vector<Code>;

  Oracle(Graph graph, AgentModel model, UpdateRule rule, int t_max, OracleOptions options = {});

  int horizon() const { return t_max_; }
  const Graph& graph() const { return graph_; }
  int obs_alphabet() const { return obs_alphabet_; }
  std::uint64_t signal_vectors() const { return vectors_; }
  /// Signal of `node` in signal vector `index` (node 0 least significant).
  Signal signal_of(std::uint64_t index, int node) const;

  double error_probability(int node, int t) const;

  /// Signal vectors y with y_node = x under which the node's observations
  /// over rounds 0..rounds-1 can equal `observed` (empty when rounds = 0).
  std::vector<std::uint64_t> feasible_set(int node, Signal x, std::span<const Code> observed,
                                          int rounds) const;

  /// Action kernel at round t for every reachable key of `node`.
  const std::map<Key, ActionKernel>& decisions(int node, int t) const;
  /// Bayesian posteriors at round t >= 1 for every reachable key of `node`.
  const std::map<Key, std::vector<double>>& posteriors(int node, int t) const;

  std::uint64_t world_count() const;

 private:
  struct World {
    std::vector<Code> traj;         // per node, action alphabet
    std::vector<std::uint32_t> active;  // per observation channel, bit u = active at round u
    double weight;
  };

  Code observed_code(const World& w, int observer, int observed, int rounds) const;
  void unroll();

  Graph graph_;
  AgentModel model_;
  UpdateRule rule_;
  int t_max_;
  OracleOptions options_;
  int obs_alphabet_;
  std::uint64_t vectors_ = 1;
  std::vector<std::vector<int>> channel_;  // [observer][slot] -> channel id
  int channels_ = 0;
  std::vector<std::vector<World>> worlds_;  // per signal vector, final round
  std::vector<std::vector<std::map<Key, ActionKernel>>> decisions_;           // [t][node]
  std::vector<std::vector<std::map<Key, std::vector<double>>>> posteriors_;  // [t][node]
};

}  // namespace bsl
