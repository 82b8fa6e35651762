#include <doctest.h>

#include <sstream>

#include "bsl/ensemble_engine.hpp"
#include "bsl/io.hpp"
#include "bsl/manifest.hpp"

using namespace bsl;

TEST_CASE("model documents") {
  const AgentModel m = parse_model(Json::parse(R"({"noise": 0.2, "tie_break": "lowest_index"})"));
  CHECK(m.signals.likelihood(1, 0) == doctest::Approx(0.2));
  CHECK(m.tie_break.variant == TieBreak::LowestIndex);

  const AgentModel full = parse_model(to_json(m));
  CHECK(to_json(full) == to_json(m));

  CHECK_THROWS_AS(parse_model(Json::parse(R"({"noise": 1.5})")), ConfigError);
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"prior": [0.5, 0.5]})")), ConfigError);
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"noise": 0.1, "states": 3})")), ConfigError);
}

TEST_CASE("graph documents") {
  const Graph g = parse_graph(Json::parse(R"({"n": 3, "edges": [[0,1],[1,2],[0,2]], "hubs": [1]})"));
  CHECK(g.size() == 3);
  CHECK(g.is_hub(1));
  CHECK(to_json(parse_graph(to_json(g))) == to_json(g));
  CHECK_THROWS_AS(parse_graph(Json::parse(R"({"edges": []})")), ConfigError);
  CHECK_THROWS_AS(parse_graph(Json::parse(R"({"n": 2, "edges": [[0]]})")), ConfigError);

  const auto rho = parse_degree_distribution(Json::parse(R"({"support": [2, 4], "probs": [0.5, 0.5]})"));
  CHECK(rho.mean() == doctest::Approx(3.0));
}

TEST_CASE("format_double keeps 17 significant digits") {
  CHECK(format_double(0.15) == "1.4999999999999999e-01");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("table serialization round trips") {
  for (const auto& rule : {UpdateRule::bayesian(), UpdateRule::majority()}) {
    auto e = EnsembleEngine::regular(AgentModel::binary(0.15), rule, 3);
    e.advance_to(2);
    const CavityTable& q = e.message(1);
    const TrajectoryTable& g = e.decision(3, 2);

    std::stringstream bin;
    write_table(bin, q, "homogeneous");
    write_table(bin, g, "degree 3");
    std::string scope;
    const CavityTable q2 = read_cavity_table(bin, &scope);
    CHECK(scope == "homogeneous");
    CHECK(q2.values() == q.values());
    const TrajectoryTable g2 = read_trajectory_table(bin, &scope);
    CHECK(scope == "degree 3");
    CHECK(g2.codes() == g.codes());
    CHECK(g2.offsets() == g.offsets());
    CHECK(g2.input_count() == g.input_count());

    const CavityTable q3 = cavity_table_from_json(Json::parse(to_json(q, "h").dump()));
    CHECK(q3.values() == q.values());
    const TrajectoryTable g3 = trajectory_table_from_json(Json::parse(to_json(g, "h").dump()));
    for (std::uint64_t i = 0; i < g.input_count(); ++i)
      g.for_each(i, [&](Code c, double p) { CHECK(g3.prob(i, c) == p); });
  }

  std::stringstream junk("not a table");
  CHECK_THROWS_AS(read_cavity_table(junk), ConfigError);
  std::stringstream wrong;
  write_table(wrong, CavityTable(0, 2, 2, 2), "");
  CHECK_THROWS_AS(read_trajectory_table(wrong), ConfigError);
}

TEST_CASE("run results") {
  RunResult r;
  r.seed = 4;
  r.errors = {{1, 2}, {0, 0}};
  r.samples = {{10, 10}, {0, 0}};
  CHECK(to_csv(r) == "node,round,errors,samples\n0,0,1,10\n0,1,2,10\n");
  const Json j = to_json(r);
  CHECK(j["nodes"].size() == 1);
  CHECK(j["nodes"][0]["rounds"][1]["rate"].get<double>() == doctest::Approx(0.2));
}

TEST_CASE("digests and manifests") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  RunManifest m;
  m.command = "table";
  m.argv = {"bsl", "table"};
  m.outputs.push_back({"x.csv", sha256_hex("")});
  const RunManifest back = RunManifest::from_json(m.to_json());
  CHECK(back.to_json() == m.to_json());
}
