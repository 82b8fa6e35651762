#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bsl/cavity.hpp"
#include "bsl/trees.hpp"

namespace bsl {

struct EngineOptions {
  int threads = 1;
  /// Refuse to build decision tables whose estimated size exceeds this.
  std::uint64_t memory_budget = std::uint64_t{3} << 30;
  bool renormalize = true;
};

/// Bookkeeping for one cavity step.
struct StepReport {
  int horizon = 0;
  /// Largest |sum - 1| over slices before renormalization.
  double normalization_drift = 0.0;
  /// Against the previous message; 0 for the first one.
  double marginalization_error = 0.0;
  /// Weighted terms visited by the site sums.
  std::uint64_t operations = 0;
  double seconds = 0.0;
};

/// Accumulates scale * (site law of a degree-`degree` node whose parent is a
/// zombie) into `out`: one slot is the parent, the other degree-1 slots are
/// children distributed as `previous`. With activation < 1 the parent and
/// the output are masked by i.i.d. edge activations and `out` lives over the
/// extended alphabet. Returns the number of terms visited.
std::uint64_t accumulate_site_message(const TrajectoryTable& g, int degree,
                                      const CavityTable* previous, const AgentModel& model,
                                      double activation, double scale, CavityTable& out,
                                      int threads = 1);

/// Exact recursion on an infinite tree where every node's degree is drawn
/// i.i.d. from rho_v (a d-regular tree when rho_v is a point mass). A single
/// message table serves every edge and one decision table per degree serves
/// every node.
class EnsembleEngine {
 public:
  EnsembleEngine(AgentModel model, UpdateRule rule, DegreeDistribution rho_v,
                 double activation = 1.0, EngineOptions options = {});

  static EnsembleEngine regular(AgentModel model, UpdateRule rule, int d,
                                EngineOptions options = {}) {
    return EnsembleEngine(std::move(model), std::move(rule), DegreeDistribution::single(d), 1.0,
                          options);
  }

  /// Decision tables exist for rounds 0..horizon().
  int horizon() const { return horizon_; }
  /// Computes the message at the current horizon, then the decisions one
  /// round later.
  void advance();
  void advance_to(int t);

  /// Error of a node drawn from rho_v at round t (<= horizon()).
  ErrorReport error_report(int t) const;
  ErrorReport error_report(int t, int degree) const;
  double error_probability(int t) const { return error_report(t).error; }

  /// Message of horizon h (< horizon()).
  const CavityTable& message(int h) const;
  const TrajectoryTable& decision(int degree, int t) const;
  bool has_degree(int degree) const { return decisions_.count(degree) != 0; }
  /// Posterior of a degree-k node at round t (>= 1); observed through t-1.
  std::vector<double> posterior(Signal x, std::span<const Code> observed, int t) const;

  const std::vector<StepReport>& steps() const { return steps_; }
  const AgentModel& model() const { return model_; }
  const UpdateRule& rule() const { return rule_; }
  const DegreeDistribution& node_degrees() const { return rho_v_; }
  const DegreeDistribution& edge_degrees() const { return rho_e_; }
  double activation() const { return activation_; }
  int obs_alphabet() const { return obs_alphabet_; }

 private:
  /// Throws BudgetError when the tables through round t would not fit.
  void check_budget(int t) const;
  void build_decisions(int t);
  double observation_weight(State s, std::span<const Code> observed, Code own_prefix,
                            int t) const;

  AgentModel model_;
  UpdateRule rule_;
  DegreeDistribution rho_v_;
  DegreeDistribution rho_e_;
  double activation_;
  EngineOptions options_;
  int obs_alphabet_;
  int horizon_ = 0;
  std::vector<CavityTable> messages_;
  std::map<int, std::vector<TrajectoryTable>> decisions_;
  std::vector<StepReport> steps_;
};

}  // namespace bsl
