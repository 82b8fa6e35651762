#include <doctest.h>

#include <cmath>
#include <set>

#include "bsl/sim.hpp"

using namespace bsl;

namespace {

const AgentModel kModel = AgentModel::binary(0.15);

bool within(const RunResult& r, int node, int t, double p, double k = 4.0) {
  return std::abs(r.rate(node, t) - p) <= k * r.standard_error(node, t, p);
}

// Radius-t ball of i is the depth-t d-regular ball: it has the right size,
// is a tree, and every node closer than t has degree d.
bool regular_ball(const Graph& g, int i, int d, int t) {
  const auto nodes = ball(g, i, t);
  const std::set<int> in(nodes.begin(), nodes.end());
  std::size_t inner_edges = 0;
  for (int u : nodes)
    for (int v : g.neighbors(u)) inner_edges += in.count(v);
  inner_edges /= 2;
  std::size_t want = 1, layer = static_cast<std::size_t>(d);
  for (int k = 1; k <= t; ++k, layer *= static_cast<std::size_t>(d - 1)) want += layer;
  if (nodes.size() != want || inner_edges + 1 != nodes.size()) return false;
  const auto dist = distances(g, i);
  for (int u : nodes)
    if (dist[static_cast<std::size_t>(u)] < t && g.degree(u) != d) return false;
  return true;
}

}  // namespace

TEST_CASE("determinism") {
  const Graph g = regular_tree(3, 3);
  GraphEngine e(g, kModel, UpdateRule::bayesian());
  e.advance_to(2);
  SimConfig cfg{2, 1, 99, 1, {}};
  const auto a = simulate(g, kModel, UpdateRule::bayesian(), tables_from(e), cfg);
  const auto b = simulate(g, kModel, UpdateRule::bayesian(), tables_from(e), cfg);
  CHECK(a.errors == b.errors);

  // scheduling does not change the tallies
  cfg.samples = 5000;
  const auto one = simulate(g, kModel, UpdateRule::majority(), {}, cfg);
  cfg.threads = 3;
  const auto three = simulate(g, kModel, UpdateRule::majority(), {}, cfg);
  CHECK(one.errors == three.errors);
  CHECK(one.samples == three.samples);
}

TEST_CASE("errors") {
  const Graph g = path_graph(3);
  SimConfig cfg{1, 10, 1, 1, {}};
  CHECK_THROWS_AS(simulate(g, kModel, UpdateRule::bayesian(), {}, cfg), ConfigError);
  const TableLookup none = [](int, int) -> const TrajectoryTable* { return nullptr; };
  CHECK_THROWS_AS(simulate(g, kModel, UpdateRule::majority(), none, cfg), ConfigError);
  // tables built for another graph
  GraphEngine other(star_graph(3), kModel, UpdateRule::majority());
  other.advance_to(1);
  CHECK_THROWS_AS(simulate(g, kModel, UpdateRule::majority(), tables_from(other), cfg), ConfigError);
}

TEST_CASE("Bayesian replay on the depth-5 tree") {
  const Graph g = regular_tree(5, 5);
  GraphEngine e(g, kModel, UpdateRule::bayesian());
  e.advance_to(2);
  SimConfig cfg{2, 1'000'000, 1, 1, {0}};
  const auto r = simulate(g, kModel, UpdateRule::bayesian(), tables_from(e), cfg);
  CHECK(within(r, 0, 1, 2.7e-2));
  for (int t = 0; t <= 2; ++t) CHECK(within(r, 0, t, e.error_probability(0, t)));
}

TEST_CASE("majority on the depth-6 ternary tree") {
  const Graph g = regular_tree(3, 6);
  GraphEngine e(g, kModel, UpdateRule::majority());
  e.advance_to(2);
  SimConfig cfg{2, 1'000'000, 3, 1, {0}};
  const auto r = simulate(g, kModel, UpdateRule::majority(), tables_from(e), cfg);
  CHECK(within(r, 0, 2, 3.0e-2));
  CHECK(within(r, 0, 2, e.error_probability(0, 2)));
  // direct rule evaluation agrees with the replayed tables
  cfg.samples = 200'000;
  const auto direct = simulate(g, kModel, UpdateRule::majority(), {}, cfg);
  CHECK(within(direct, 0, 2, e.error_probability(0, 2)));
}

TEST_CASE("interior nodes") {
  const Graph g = regular_tree(3, 5);
  const auto dist = distances(g, 0);
  std::vector<int> expect;
  for (int u = 0; u < g.size(); ++u)
    if (dist[static_cast<std::size_t>(u)] <= 3) expect.push_back(u);
  CHECK(interior_nodes(g, 3, 2) == expect);
  CHECK(interior_nodes(g, 3, 0).size() == static_cast<std::size_t>(g.size()));

  const auto sample = sample_configuration_graph(DegreeDistribution::single(3), 500, 4);
  std::vector<int> brute;
  for (int u = 0; u < sample.graph.size(); ++u)
    if (regular_ball(sample.graph, u, 3, 2)) brute.push_back(u);
  CHECK(interior_nodes(sample.graph, 3, 2) == brute);
}

TEST_CASE("configuration-model interior nodes follow the tree values") {
  const auto sample = sample_configuration_graph(DegreeDistribution::single(3), 2000, 5);
  const auto interior = interior_nodes(sample.graph, 3, 2);
  REQUIRE(interior.size() > 1800);
  auto engine = EnsembleEngine::regular(kModel, UpdateRule::bayesian(), 3);
  engine.advance_to(2);
  const std::vector<int> focus(interior.begin(), interior.begin() + 5);
  SimConfig cfg{2, 200'000, 8, 1, focus};
  const auto r = simulate(sample.graph, kModel, UpdateRule::bayesian(),
                          tables_from(engine, sample.graph), cfg);
  for (int u : focus)
    for (int t = 0; t <= 2; ++t) CHECK(within(r, u, t, engine.error_probability(t)));
}
