// bsl: error tables, decay curves, bounds, oracle verification and Monte
// Carlo runs for iterative Bayesian and majority learning on trees.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "bsl/commands.hpp"
#include "bsl/io.hpp"
#include "bsl/manifest.hpp"
#include "bsl/sim.hpp"

using namespace bsl;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfig = 2, kBudget = 3 };

struct Common {
  std::string rule = "bayesian";
  int d = 5;
  double noise = 0.15;
  int rounds = 4;
  std::string model_path;
  std::string graph_path;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  int given_state = -1;
};

AgentModel load_model(const Common& c) {
  if (!c.model_path.empty()) return parse_model(read_json_file(c.model_path));
  if (!(c.noise >= 0.0 && c.noise <= 1.0)) throw ConfigError("--noise must lie in [0, 1]");
  return AgentModel::binary(c.noise);
}

EngineOptions engine_options(const Common& c) {
  EngineOptions e;
  e.threads = std::max(1, c.threads);
  return e;
}

class Run {
 public:
  Run(std::string command, int argc, char** argv) : start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    for (int i = 0; i < argc; ++i) manifest_.argv.emplace_back(argv[i]);
  }
  RunManifest& manifest() { return manifest_; }

  // Writes to `path`, or to stdout when no --out was given.
  void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
      std::cout << content;
      return;
    }
    manifest_.write_output(path, content);
  }

  void finish(const std::string& out) {
    if (out.empty()) return;
    manifest_.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file_atomic(out + ".manifest.json", manifest_.to_json().dump(2) + "\n");
  }

  void flag_unstable(const std::string& label, const std::vector<double>& values) {
    for (std::size_t t = 0; t < values.size(); ++t)
      if (values[t] < kUnreliableBelow)
        manifest_.instability.push_back(label + " round " + std::to_string(t) + " = " +
                                        format_double(values[t]));
  }

 private:
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

Json common_json(const Common& c) {
  return {{"rule", c.rule},       {"d", c.d},         {"noise", c.noise},
          {"rounds", c.rounds},   {"model", c.model_path}, {"threads", c.threads},
          {"given_state", c.given_state}};
}

CurveRequest curve_request(const Common& c, int d) {
  CurveRequest req;
  req.model = load_model(c);
  req.rule = rule_from_name(c.rule);
  req.d = d;
  req.rounds = c.rounds;
  if (c.given_state >= 0) req.given_state = c.given_state;
  req.engine = engine_options(c);
  return req;
}

double noise_label(const Common& c) { return c.model_path.empty() ? c.noise : std::nan(""); }

int cmd_table(const Common& c, Run& run) {
  const CurveResult res = regular_tree_errors(curve_request(c, c.d));
  run.manifest().config = common_json(c);
  run.flag_unstable(c.rule + " d=" + std::to_string(c.d), res.errors);
  run.emit(c.out, table_csv(c.rule, c.d, noise_label(c), res.errors));
  run.finish(c.out);
  return kOk;
}

int cmd_curve(const Common& c, const std::vector<int>& ds, Run& run) {
  std::string csv;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const CurveResult res = regular_tree_errors(curve_request(c, ds[k]));
    run.flag_unstable(c.rule + " d=" + std::to_string(ds[k]), res.errors);
    csv += curve_csv(c.rule, ds[k], noise_label(c), res.errors, k == 0);
  }
  Json cfg = common_json(c);
  cfg["d_list"] = ds;
  run.manifest().config = cfg;
  run.emit(c.out, csv);
  run.finish(c.out);
  return kOk;
}

int cmd_bounds(const Common& c, const std::string& variant, double delta0, Run& run) {
  const BoundSequence seq = bound_sequence(parse_bound_variant(variant), c.d, delta0, c.rounds);
  run.manifest().config = {{"variant", variant}, {"d", c.d}, {"delta0", delta0}, {"rounds", c.rounds}};
  run.emit(c.out, bounds_csv(seq));
  run.finish(c.out);
  return kOk;
}

int cmd_verify(const Common& c, int max_nodes, int max_t, int invariant_t, Run& run) {
  VerifyReport rep = verify_against_oracle(max_nodes, max_t, 1e-10, c.noise);
  const VerifyReport inv = invariant_suite({3, 5}, {0.15, 0.3}, invariant_t);
  rep.lines.insert(rep.lines.end(), inv.lines.begin(), inv.lines.end());
  run.manifest().config = {{"max_nodes", max_nodes}, {"max_t", max_t},
                           {"invariant_t", invariant_t}, {"noise", c.noise}};
  run.emit(c.out, rep.text());
  run.finish(c.out);
  return rep.passed() ? kOk : kVerifyFailed;
}

int cmd_conjecture(const Common& c, Run& run) {
  std::vector<ConjectureResult> results;
  bool holds = true;
  for (const auto& row : default_conjecture_configs()) {
    results.push_back(run_conjecture(row, engine_options(c)));
    holds = holds && results.back().report.holds;
  }
  run.manifest().config = {{"threads", c.threads}};
  run.emit(c.out, conjecture_csv(results));
  run.finish(c.out);
  std::cerr << "conjecture " << (holds ? "holds" : "violated") << " on every configuration\n";
  return holds ? kOk : kVerifyFailed;
}

// "regular:d:depth", "path:n", "star:leaves" or "binary:depth".
Graph generate(const std::string& spec) {
  std::vector<int> args;
  std::string kind;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) {
    if (kind.empty()) {
      kind = part;
      continue;
    }
    try {
      args.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw ConfigError("bad generator argument '" + part + "'");
    }
  }
  if (kind == "regular" && args.size() == 2) return regular_tree(args[0], args[1]);
  if (kind == "path" && args.size() == 1) return path_graph(args[0]);
  if (kind == "star" && args.size() == 1) return star_graph(args[0]);
  if (kind == "binary" && args.size() == 1) return binary_tree(args[0]);
  throw ConfigError("unknown generator '" + spec + "'");
}

int cmd_simulate(const Common& c, const std::string& generator, std::vector<int> focus,
                 bool direct, Run& run) {
  if (c.graph_path.empty() == generator.empty())
    throw ConfigError("simulate needs exactly one of --graph and --generator");
  const Graph graph =
      c.graph_path.empty() ? generate(generator) : parse_graph(read_json_file(c.graph_path));
  const AgentModel model = load_model(c);
  const UpdateRule rule = rule_from_name(c.rule);
  if (focus.empty() && !generator.empty()) focus = {0};

  SimConfig cfg;
  cfg.rounds = c.rounds;
  cfg.samples = c.samples;
  cfg.seed = c.seed;
  cfg.threads = std::max(1, c.threads);
  cfg.focus = focus;

  std::unique_ptr<GraphEngine> engine;
  TableLookup tables;
  if (!direct) {
    GraphEngineOptions opts;
    opts.engine = engine_options(c);
    engine = std::make_unique<GraphEngine>(graph, model, rule, opts);
    engine->advance_to(c.rounds);
    tables = tables_from(*engine);
  }
  RunResult result = simulate(graph, model, rule, tables, cfg);
  result.graph = c.graph_path.empty() ? generator : c.graph_path;
  result.model_hash = sha256_hex(to_json(model).dump());

  Json cfg_json = common_json(c);
  cfg_json["graph"] = c.graph_path;
  cfg_json["generator"] = generator;
  cfg_json["samples"] = c.samples;
  cfg_json["seed"] = c.seed;
  cfg_json["focus"] = focus;
  cfg_json["direct"] = direct;
  run.manifest().config = cfg_json;
  if (c.out.empty()) {
    std::cout << to_json(result).dump(2) << '\n';
  } else {
    run.emit(c.out + ".json", to_json(result).dump(2) + "\n");
    run.emit(c.out + ".csv", to_csv(result));
  }
  run.finish(c.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error probabilities of iterative learning on trees"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App* sub, bool engine_flags) {
    sub->add_option("--out", c.out, "Output file (or prefix for simulate); stdout when absent");
    sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    if (!engine_flags) return;
    sub->add_option("--rule", c.rule, "bayesian or majority");
    sub->add_option("--noise", c.noise, "Binary symmetric signal noise");
    sub->add_option("--rounds", c.rounds, "Last round")->check(CLI::NonNegativeNumber);
    sub->add_option("--model", c.model_path, "Model JSON (overrides --noise)");
    sub->add_option("--given-state", c.given_state,
                    "Condition on this state instead of averaging over the prior");
  };

  auto* table = app.add_subcommand("table", "Exact error per round on the d-regular tree");
  add_common(table, true);
  table->add_option("--d", c.d, "Degree")->check(CLI::PositiveNumber);

  std::vector<int> ds{3, 5, 7};
  auto* curve = app.add_subcommand("curve", "Error decay with log(-log p) and slopes");
  add_common(curve, true);
  curve->add_option("--d", ds, "Degrees");

  std::string variant = "undirected";
  double delta0 = 0.15;
  auto* bounds = app.add_subcommand("bounds", "Majority bound recursions");
  add_common(bounds, false);
  bounds->add_option("--variant", variant, "directed, undirected or chernoff");
  bounds->add_option("--d", c.d, "Degree");
  bounds->add_option("--delta0", delta0, "Initial error");
  bounds->add_option("--rounds", c.rounds, "Last round")->check(CLI::NonNegativeNumber);

  int max_nodes = 8, max_t = 3, invariant_t = 4;
  auto* verify = app.add_subcommand("verify", "Engine against brute force, plus invariants");
  add_common(verify, false);
  verify->add_option("--max-nodes", max_nodes);
  verify->add_option("--max-t", max_t);
  verify->add_option("--invariant-t", invariant_t);
  verify->add_option("--noise", c.noise);

  std::string generator;
  std::vector<int> focus;
  bool direct = false;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo run on a finite graph");
  add_common(sim, true);
  sim->add_option("--graph", c.graph_path, "Graph JSON");
  sim->add_option("--generator", generator, "regular:d:depth, path:n, star:leaves, binary:depth");
  sim->add_option("--samples", c.samples);
  sim->add_option("--seed", c.seed);
  sim->add_option("--focus", focus, "Nodes whose errors are wanted (default: all, or 0 for generators)");
  sim->add_flag("--direct", direct, "Evaluate a majority rule directly instead of replaying tables");

  auto* conj = app.add_subcommand("conjecture", "Bayesian <= majority on the reference configurations");
  add_common(conj, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    Run run(app.get_subcommands().front()->get_name(), argc, argv);
    if (*table) return cmd_table(c, run);
    if (*curve) return cmd_curve(c, ds, run);
    if (*bounds) return cmd_bounds(c, variant, delta0, run);
    if (*verify) return cmd_verify(c, max_nodes, max_t, invariant_t, run);
    if (*sim) return cmd_simulate(c, generator, focus, direct, run);
    if (*conj) return cmd_conjecture(c, run);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kOk;
}
