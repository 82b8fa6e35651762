#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bsl/bounds.hpp"
#include "bsl/ensemble_engine.hpp"
#include "bsl/graph_engine.hpp"
#include "bsl/oracle.hpp"

namespace bsl {

UpdateRule rule_from_name(const std::string& name);

struct CurveRequest {
  AgentModel model = AgentModel::binary(0.15);
  UpdateRule rule;
  int d = 3;
  int rounds = 0;
  /// Condition on a fixed state instead of averaging over the prior.
  std::optional<State> given_state;
  EngineOptions engine;
};

struct CurveResult {
  std::vector<double> errors;  ///< rounds 0..rounds
  std::vector<StepReport> steps;
  double max_mass_deviation = 0.0;
  double seconds = 0.0;
};

/// Error probability on the infinite d-regular tree.
CurveResult regular_tree_errors(const CurveRequest& request);

/// rule,d,noise,round,error_prob,unreliable
std::string table_csv(const std::string& rule, int d, double noise,
                      const std::vector<double>& errors);
/// rule,d,noise,round,error_prob,log_neg_log,slope (slope empty at round 0).
std::string curve_csv(const std::string& rule, int d, double noise,
                      const std::vector<double>& errors, bool header = true);
/// variant,d,delta0,t,value
std::string bounds_csv(const BoundSequence& seq);
BoundSequence bound_sequence(BoundVariant variant, int d, double delta0, int rounds);

/// Kernel over the round-t action implied by a trajectory table, given the
/// agent's own trajectory through t-1. Empty when `own` has zero mass.
ActionKernel kernel_from_table(const TrajectoryTable& table, Signal x,
                               std::span<const Code> observed, Code own);

struct CheckLine {
  std::string name;
  double value = 0.0;      ///< measured deviation
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

struct VerifyReport {
  std::vector<CheckLine> lines;
  bool passed() const;
  std::string text() const;
};

/// Engine decision kernels and error probabilities against the brute-force
/// oracle on paths, stars and the depth-2 binary tree (up to max_nodes),
/// both rules, rounds 0..max_t.
VerifyReport verify_against_oracle(int max_nodes, int max_t, double tolerance = 1e-10,
                                   double noise = 0.15);

/// Normalization, marginalization, coupling mass, flip symmetry and Bayesian
/// monotonicity for d in `degrees`, noise in `noises`, rounds 0..max_t.
VerifyReport invariant_suite(const std::vector<int>& degrees, const std::vector<double>& noises,
                             int max_t);

struct ConjectureRow {
  int d;
  double noise;
  int rounds;
};

struct ConjectureResult {
  ConjectureRow config;
  std::vector<double> bayes;
  std::vector<double> majority;
  ConjectureReport report;
};

std::vector<ConjectureRow> default_conjecture_configs();
ConjectureResult run_conjecture(const ConjectureRow& row, const EngineOptions& engine = {});
/// d,noise,round,bayesian,majority,holds
std::string conjecture_csv(const std::vector<ConjectureResult>& results);

}  // namespace bsl
