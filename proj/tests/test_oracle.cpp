#include <doctest.h>

#include <set>

#include "bsl/oracle.hpp"

using namespace bsl;

namespace {

const AgentModel kModel = AgentModel::binary(0.15);

// P(signal vector) under state s, node 0 in the least significant bit.
double vector_prob(std::uint64_t y, int n, State s, double noise) {
  double p = 1.0;
  for (int i = 0; i < n; ++i) p *= (((y >> i) & 1u) == static_cast<unsigned>(s)) ? 1 - noise : noise;
  return p;
}

}  // namespace

TEST_CASE("single node repeats its signal") {
  const Oracle o(Graph(1, {}, {}, {}), kModel, UpdateRule::bayesian(), 2);
  for (int t = 0; t <= 2; ++t) CHECK(o.error_probability(0, t) == doctest::Approx(0.15).epsilon(1e-14));
  const auto& d = o.decisions(0, 0);
  for (const auto& [key, kernel] : d) CHECK(kernel[static_cast<std::size_t>(key[0])] == 1.0);
}

TEST_CASE("two-node path at t=1") {
  // Agreement confirms the own signal and disagreement is a tie broken
  // toward it, so node 0 still votes x0.
  double expect = 0.0;
  for (State s = 0; s < 2; ++s)
    for (std::uint64_t y = 0; y < 4; ++y)
      if ((y & 1u) != static_cast<unsigned>(s)) expect += 0.5 * vector_prob(y, 2, s, 0.15);
  const Oracle o(path_graph(2), kModel, UpdateRule::bayesian(), 1);
  CHECK(o.error_probability(0, 1) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(o.error_probability(1, 1) == doctest::Approx(0.15).epsilon(1e-14));
}

TEST_CASE("four-node star center at t=1") {
  double expect = 0.0;
  for (State s = 0; s < 2; ++s)
    for (std::uint64_t y = 0; y < 16; ++y) {
      int wrong = 0;
      for (int i = 0; i < 4; ++i) wrong += ((y >> i) & 1u) != static_cast<unsigned>(s);
      // four votes; a 2-2 split falls back on the center's own signal (node 0)
      const bool center_wrong = ((y & 1u) != static_cast<unsigned>(s));
      if (wrong > 2 || (wrong == 2 && center_wrong)) expect += 0.5 * vector_prob(y, 4, s, 0.15);
    }
  CHECK(expect == doctest::Approx(0.06075).epsilon(1e-12));
  for (const auto& rule : {UpdateRule::bayesian(), UpdateRule::majority()}) {
    const Oracle o(star_graph(3), kModel, rule, 1);
    CHECK(o.error_probability(0, 0) == doctest::Approx(0.15).epsilon(1e-14));
    if (rule.kind == RuleKind::Bayesian)
      CHECK(o.error_probability(0, 1) == doctest::Approx(expect).epsilon(1e-13));
    else  // the majority center ignores its own signal: P(Binomial(3, 0.15) >= 2)
      CHECK(o.error_probability(0, 1) == doctest::Approx(0.06075).epsilon(1e-13));
  }
}

TEST_CASE("feasible sets") {
  const Oracle p2(path_graph(2), kModel, UpdateRule::bayesian(), 2);
  const std::vector<Code> unused{0};
  CHECK(p2.feasible_set(0, 0, unused, 0).size() == 2);
  const std::vector<Code> minus{1};
  CHECK(p2.feasible_set(0, 0, minus, 1) == std::vector<std::uint64_t>{2});

  for (const Graph& g : {path_graph(3), path_graph(5), star_graph(4)}) {
    const Oracle o(g, kModel, UpdateRule::bayesian(), 3);
    const int n = g.size();
    for (int i = 0; i < n; ++i)
      for (Signal x = 0; x < 2; ++x)
        for (int rounds = 0; rounds <= 3; ++rounds) {
          const auto obs = g.observed(i);
          const std::uint64_t per = std::uint64_t{1} << rounds;
          std::uint64_t tuples = 1;
          for (std::size_t m = 0; m < obs.size(); ++m) tuples *= per;
          std::multiset<std::uint64_t> covered;
          std::vector<Code> codes(obs.size());
          for (std::uint64_t k = 0; k < tuples; ++k) {
            std::uint64_t r = k;
            for (auto& c : codes) {
              c = static_cast<Code>(r % per);
              r /= per;
            }
            for (auto y : o.feasible_set(i, x, codes, rounds)) covered.insert(y);
          }
          // a partition of {y : y_i = x}
          std::multiset<std::uint64_t> expect;
          for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y)
            if (static_cast<Signal>((y >> i) & 1u) == x) expect.insert(y);
          CHECK(covered == expect);
        }
  }
}

TEST_CASE("Bayesian error does not increase") {
  for (const Graph& g : {path_graph(5), star_graph(4), binary_tree(2)}) {
    const Oracle o(g, kModel, UpdateRule::bayesian(), 3);
    for (int i = 0; i < g.size(); ++i)
      for (int t = 1; t <= 3; ++t)
        CHECK(o.error_probability(i, t) <= o.error_probability(i, t - 1) + 1e-15);
  }
}

TEST_CASE("relabeling") {
  // path 0-1-2 and the same path written as 1-2-0
  const Oracle a(path_graph(3), kModel, UpdateRule::bayesian(), 3);
  const Oracle b(Graph(3, {{1, 2}, {2, 0}}, {}, {}), kModel, UpdateRule::bayesian(), 3);
  const int map[3] = {1, 2, 0};
  for (int i = 0; i < 3; ++i)
    for (int t = 0; t <= 3; ++t)
      CHECK(a.error_probability(i, t) == doctest::Approx(b.error_probability(map[i], t)).epsilon(1e-14));
}

TEST_CASE("budget guard") {
  OracleOptions small;
  small.budget = 1000;
  CHECK_THROWS_AS(Oracle(path_graph(10), kModel, UpdateRule::bayesian(), 3, small), BudgetError);
}

TEST_CASE("posteriors sum to one") {
  const Oracle o(star_graph(3), kModel, UpdateRule::bayesian(), 2);
  for (int t = 1; t <= 2; ++t)
    for (const auto& [key, post] : o.posteriors(0, t)) CHECK(post[0] + post[1] == doctest::Approx(1.0));
}
