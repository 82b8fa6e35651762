#include "bsl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bsl/numeric.hpp"

namespace bsl {

std::string to_string(BoundVariant v) {
  switch (v) {
    case BoundVariant::Directed: return "directed";
    case BoundVariant::Undirected: return "undirected";
    case BoundVariant::Chernoff: return "chernoff";
  }
  return "?";
}

BoundVariant parse_bound_variant(const std::string& name) {
  if (name == "directed") return BoundVariant::Directed;
  if (name == "undirected") return BoundVariant::Undirected;
  if (name == "chernoff") return BoundVariant::Chernoff;
  throw ConfigError("unknown bound variant '" + name + "'");
}

double binomial_tail(int n, double p, int k) {
  if (n < 0) throw ConfigError("binomial needs n >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("binomial needs p in [0, 1]");
  k = std::max(k, 0);
  if (k > n) return 0.0;
  CompensatedSum sum;
  double coef = 1.0;  // C(n, j)
  for (int j = 0; j <= n; ++j) {
    if (j > 0) coef = coef * (n - j + 1) / j;
    if (j >= k) sum.add(coef * std::pow(p, j) * std::pow(1.0 - p, n - j));
  }
  return std::min(1.0, sum.value());
}

int undirected_threshold(int d) { return d / 2 - 1 + d % 2; }
int directed_threshold(int d) { return (d + 1) / 2; }

namespace {

void check_delta(double delta0) {
  if (!(delta0 >= 0.0 && delta0 <= 1.0)) throw ConfigError("delta0 must lie in [0, 1]");
}

}  // namespace

BoundSequence undirected_bound_sequence(int d, double delta0, int rounds) {
  if (d < 3) throw ConfigError("undirected bound needs d >= 3");
  check_delta(delta0);
  BoundSequence out{BoundVariant::Undirected, d, delta0, {delta0}};
  for (int t = 1; t <= rounds; ++t)
    out.values.push_back(binomial_tail(d - 1, out.values.back(), undirected_threshold(d)));
  return out;
}

BoundSequence directed_bound_sequence(int d, double delta0, int rounds) {
  if (d < 1) throw ConfigError("directed bound needs d >= 1");
  check_delta(delta0);
  BoundSequence out{BoundVariant::Directed, d, delta0, {delta0}};
  for (int t = 1; t <= rounds; ++t)
    out.values.push_back(binomial_tail(d, out.values.back(), directed_threshold(d)));
  return out;
}

double chernoff_step(int d, double delta) {
  if (d < 3) throw ConfigError("Chernoff envelope needs d >= 3");
  const double base = 2.0 * std::numbers::e * delta * (d - 1) / (d - 2);
  return std::min(1.0, std::pow(base, (d - 2) / 2.0));
}

BoundSequence chernoff_envelope(int d, double delta0, int rounds) {
  check_delta(delta0);
  BoundSequence out{BoundVariant::Chernoff, d, delta0, {delta0}};
  for (int t = 1; t <= rounds; ++t) out.values.push_back(chernoff_step(d, out.values.back()));
  return out;
}

double noise_threshold(int d) {
  if (d <= 4) throw ConfigError("noise threshold needs d > 4");
  return std::pow(2.0 * std::numbers::e * (d - 1) / (d - 2),
                  -static_cast<double>(d - 2) / (d - 4));
}

ActionKernel majority_vote(std::span<const int> votes) {
  if (votes.empty()) throw ConfigError("majority vote of an empty neighborhood");
  int sum = 0;
  for (int v : votes) {
    if (v != 1 && v != -1) throw ConfigError("votes must be +1 or -1");
    sum += v;
  }
  if (sum > 0) return {0.0, 1.0};
  if (sum < 0) return {1.0, 0.0};
  return {0.5, 0.5};
}

SlopeReport doubling_slope(std::span<const double> errors) {
  SlopeReport rep;
  for (double p : errors)
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("doubling slope needs probabilities in (0, 1)");
  for (std::size_t t = 0; t + 1 < errors.size(); ++t)
    rep.slopes.push_back(std::log(-std::log(errors[t + 1])) - std::log(-std::log(errors[t])));
  if (rep.slopes.empty()) return rep;
  const std::size_t first = rep.slopes.size() == 1 ? 0 : 1;
  rep.doubly_exponential =
      std::all_of(rep.slopes.begin() + static_cast<std::ptrdiff_t>(first), rep.slopes.end(),
                  [](double s) { return s > 0.0; });
  return rep;
}

ConjectureReport conjecture_check(std::span<const double> bayes, std::span<const double> majority) {
  if (bayes.size() != majority.size())
    throw ConfigError("conjecture check needs sequences of equal length");
  ConjectureReport rep;
  for (std::size_t t = 0; t < bayes.size(); ++t)
    if (bayes[t] > majority[t] * (1.0 + 1e-12)) rep.violations.push_back(static_cast<int>(t));
  rep.holds = rep.violations.empty();
  return rep;
}

}  // namespace bsl
