#include <doctest.h>

#include <algorithm>
#include <set>

#include "bsl/trees.hpp"

using namespace bsl;

TEST_CASE("validate") {
  CHECK(validate(path_graph(3)).ok);
  CHECK(validate(Graph(3, {{0, 1}, {1, 2}, {0, 2}}, {}, {1})).ok);

  const Diagnostic bad = validate(Graph(3, {{0, 1}, {1, 2}, {0, 2}}, {}, {}));
  CHECK_FALSE(bad.ok);
  std::vector<int> cycle = bad.cycle;
  std::sort(cycle.begin(), cycle.end());
  CHECK(cycle == std::vector<int>{0, 1, 2});

  // mutual observation is a 2-cycle and allowed; longer directed cycles are not
  CHECK(validate(Graph(2, {}, {{0, 1}, {1, 0}}, {})).ok);
  CHECK_FALSE(validate(Graph(3, {}, {{0, 1}, {1, 2}, {2, 0}}, {})).ok);

  CHECK_THROWS_AS(Graph(2, {{0, 0}}, {}, {}), ConfigError);
  CHECK_THROWS_AS(Graph(2, {{0, 1}, {1, 0}}, {}, {}), ConfigError);
  CHECK_THROWS_AS(Graph(2, {{0, 2}}, {}, {}), ConfigError);
}

TEST_CASE("neighbor lists are sorted") {
  const Graph g(5, {{4, 0}, {0, 2}, {3, 0}, {0, 1}}, {}, {});
  const auto nb = g.neighbors(0);
  CHECK(std::is_sorted(nb.begin(), nb.end()));
  CHECK(nb.size() == 4);
}

TEST_CASE("directed_subtree") {
  // path a-b-c
  const Subtree s = directed_subtree(path_graph(3), 1, 0);
  CHECK(s.graph.size() == 2);
  CHECK(std::set<int>(s.original.begin(), s.original.end()) == std::set<int>{1, 2});
  CHECK(s.original[0] == 1);

  const Subtree leaf = directed_subtree(star_graph(3), 1, 0);
  CHECK(leaf.original == std::vector<int>{1});

  const Graph bin = binary_tree(2);
  const Subtree half = directed_subtree(bin, 1, 0);
  CHECK(half.graph.size() == 3);
  CHECK(half.graph.degree(0) == 2);

  // subtrees hanging off one node are disjoint
  const Graph t = regular_tree(3, 3);
  std::set<int> seen;
  std::size_t total = 0;
  for (int j : t.neighbors(0)) {
    const Subtree st = directed_subtree(t, j, 0);
    total += st.original.size();
    seen.insert(st.original.begin(), st.original.end());
  }
  CHECK(seen.size() == total);
  CHECK(total == static_cast<std::size_t>(t.size() - 1));
}

TEST_CASE("ball") {
  const Graph t = regular_tree(5, 3);
  CHECK(ball(t, 0, 0) == std::vector<int>{0});
  CHECK(ball(t, 0, 1).size() == 6);
  CHECK(ball(path_graph(7), 3, 2).size() == 5);
  for (int r = 0; r < 4; ++r) {
    const auto small = ball(t, 7, r);
    const auto big = ball(t, 7, r + 1);
    CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
    std::size_t bound = 1, layer = 5;
    for (int k = 1; k <= r; ++k, layer *= 4) bound += layer;
    CHECK(small.size() <= bound);
  }
}

TEST_CASE("edge_perspective") {
  const auto one = edge_perspective(DegreeDistribution::single(5));
  CHECK(one.support() == std::vector<int>{5});
  CHECK(one.prob(5) == 1.0);

  const DegreeDistribution mix({2, 4}, {0.5, 0.5});
  const auto e = edge_perspective(mix);
  // rho_E(d) = d rho_V(d) / sum_k k rho_V(k)
  CHECK(e.prob(2) == doctest::Approx(2 * 0.5 / (2 * 0.5 + 4 * 0.5)).epsilon(1e-15));
  CHECK(e.prob(4) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(edge_perspective(e).prob(4) != doctest::Approx(e.prob(4)));

  CHECK(edge_perspective(DegreeDistribution::single(1)).prob(1) == 1.0);
  CHECK_THROWS_AS(DegreeDistribution({2, 3}, {0.5, 0.6}), ConfigError);
}

TEST_CASE("configuration model") {
  const auto cycles = sample_configuration_graph(DegreeDistribution::single(2), 4, 7);
  for (int i = 0; i < 4; ++i) {
    CHECK(cycles.graph.degree(i) == 2);
    CHECK(cycles.tree_radius[static_cast<std::size_t>(i)] != kUnboundedRadius);
  }

  const auto a = sample_configuration_graph(DegreeDistribution::single(3), 200, 11);
  const auto b = sample_configuration_graph(DegreeDistribution::single(3), 200, 11);
  CHECK(a.graph.edges() == b.graph.edges());

  // the locally-tree-like property, checked empirically
  double worst = 1.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = sample_configuration_graph(DegreeDistribution::single(3), 1000, seed);
    int good = 0;
    for (int r : s.tree_radius) good += r >= 2;
    worst = std::min(worst, good / 1000.0);
    CHECK(s.graph.edges().size() == 1500u);
  }
  CHECK(worst > 0.9);
}

TEST_CASE("tree_ball_radius") {
  CHECK(tree_ball_radius(path_graph(4), 0) == kUnboundedRadius);
  // square: radius-1 balls are paths, radius 2 closes the loop
  const Graph sq(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {}, {});
  CHECK(tree_ball_radius(sq, 0) == 1);
  const Graph tri(3, {{0, 1}, {1, 2}, {0, 2}}, {}, {});
  CHECK(tree_ball_radius(tri, 0) == 0);
}
