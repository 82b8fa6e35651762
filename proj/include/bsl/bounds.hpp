#pragma once

#include <span>
#include <string>
#include <vector>

#include "bsl/model.hpp"

namespace bsl {

enum class BoundVariant { Directed, Undirected, Chernoff };

std::string to_string(BoundVariant v);
BoundVariant parse_bound_variant(const std::string& name);

struct BoundSequence {
  BoundVariant variant = BoundVariant::Undirected;
  int d = 0;
  double delta0 = 0.0;
  std::vector<double> values;  ///< delta_0 .. delta_T
};

/// P(Binomial(n, p) >= k) by direct summation.
double binomial_tail(int n, double p, int k);

/// Integer forms of the thresholds d/2 - 1 and d/2 (rounded up).
int undirected_threshold(int d);
int directed_threshold(int d);

/// delta_t = P(Bin(d-1, delta_{t-1}) >= d/2 - 1), majority on undirected trees.
BoundSequence undirected_bound_sequence(int d, double delta0, int rounds);
/// delta_t = P(Bin(d, delta_{t-1}) >= d/2), majority on directed trees.
BoundSequence directed_bound_sequence(int d, double delta0, int rounds);

/// One step of the Chernoff envelope, clamped to 1.
double chernoff_step(int d, double delta);
BoundSequence chernoff_envelope(int d, double delta0, int rounds);
/// Noise level below which the envelope contracts; needs d > 4.
double noise_threshold(int d);

/// Majority of +1/-1 votes; returns {P(-1), P(+1)} with a fair coin on ties.
ActionKernel majority_vote(std::span<const int> votes);

struct SlopeReport {
  std::vector<double> slopes;  ///< log(-log p_{t+1}) - log(-log p_t)
  /// Every slope from round 1 on is positive (the only slope, for two points).
  bool doubly_exponential = false;
};

SlopeReport doubling_slope(std::span<const double> errors);

struct ConjectureReport {
  std::vector<int> violations;  ///< rounds where bayes > majority
  bool holds = true;
};

/// Weak per-round comparison bayes <= majority (relative slack 1e-12).
ConjectureReport conjecture_check(std::span<const double> bayes, std::span<const double> majority);

}  // namespace bsl
