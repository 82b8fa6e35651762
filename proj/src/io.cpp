#include "bsl/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bsl {

namespace {

template <class T>
T field(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad field '") + key + "': " + e.what());
  }
}

std::vector<Edge> edge_list(const Json& doc, const char* key) {
  std::vector<Edge> out;
  if (!doc.contains(key)) return out;
  for (const auto& e : doc.at(key)) {
    if (!e.is_array() || e.size() != 2) throw ConfigError(std::string("bad edge in '") + key + "'");
    out.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return out;
}

}  // namespace

AgentModel parse_model(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("model document must be an object");
  std::vector<double> prior;
  std::vector<std::vector<double>> likelihood;
  if (doc.contains("noise")) {
    const double noise = field<double>(doc, "noise");
    if (!(noise >= 0.0 && noise <= 1.0)) throw ConfigError("noise must lie in [0, 1]");
    prior = doc.contains("prior") ? field<std::vector<double>>(doc, "prior")
                                  : std::vector<double>{0.5, 0.5};
    likelihood = {{1.0 - noise, noise}, {noise, 1.0 - noise}};
  } else {
    prior = field<std::vector<double>>(doc, "prior");
    likelihood = field<std::vector<std::vector<double>>>(doc, "likelihood");
  }
  SignalModel signals(prior, likelihood);
  if (doc.contains("states") && field<int>(doc, "states") != signals.num_states())
    throw ConfigError("'states' disagrees with the prior");
  if (doc.contains("signals") && field<int>(doc, "signals") != signals.num_signals())
    throw ConfigError("'signals' disagrees with the likelihood");

  UtilityTable utility = UtilityTable::identity(signals.num_states());
  if (doc.contains("utility")) {
    const auto rows = field<std::vector<std::vector<double>>>(doc, "utility");
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != signals.num_states())
        throw ConfigError("utility rows need one entry per state");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    utility = UtilityTable(static_cast<int>(rows.size()), signals.num_states(), flat);
  }
  TieBreakRule tie;
  if (doc.contains("tie_break")) tie.variant = parse_tie_break(field<std::string>(doc, "tie_break"));
  if (doc.contains("signal_to_action"))
    tie.signal_to_action = field<std::vector<Action>>(doc, "signal_to_action");
  AgentModel model{signals, utility, tie};
  model.validate();
  return model;
}

Json to_json(const AgentModel& model) {
  Json doc;
  doc["states"] = model.num_states();
  doc["signals"] = model.num_signals();
  doc["prior"] = model.signals.prior_vector();
  Json rows = Json::array();
  for (State s = 0; s < model.num_states(); ++s) {
    std::vector<double> r;
    for (Signal x = 0; x < model.num_signals(); ++x) r.push_back(model.signals.likelihood(x, s));
    rows.push_back(r);
  }
  doc["likelihood"] = rows;
  Json util = Json::array();
  for (Action a = 0; a < model.num_actions(); ++a) {
    std::vector<double> r;
    for (State s = 0; s < model.num_states(); ++s) r.push_back(model.utility(a, s));
    util.push_back(r);
  }
  doc["utility"] = util;
  doc["tie_break"] = to_string(model.tie_break.variant);
  if (!model.tie_break.signal_to_action.empty())
    doc["signal_to_action"] = model.tie_break.signal_to_action;
  return doc;
}

Graph parse_graph(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("graph document must be an object");
  std::vector<int> hubs;
  if (doc.contains("hubs")) hubs = field<std::vector<int>>(doc, "hubs");
  return Graph(field<int>(doc, "n"), edge_list(doc, "edges"), edge_list(doc, "directed_edges"),
               hubs);
}

Json to_json(const Graph& graph) {
  Json doc;
  doc["n"] = graph.size();
  Json edges = Json::array();
  for (const auto& [a, b] : graph.edges()) edges.push_back({a, b});
  doc["edges"] = edges;
  Json directed = Json::array();
  for (const auto& [a, b] : graph.directed_edges()) directed.push_back({a, b});
  doc["directed_edges"] = directed;
  doc["hubs"] = graph.hubs();
  return doc;
}

DegreeDistribution parse_degree_distribution(const Json& doc) {
  return DegreeDistribution(field<std::vector<int>>(doc, "support"),
                            field<std::vector<double>>(doc, "probs"));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << content;
    if (!out) throw ConfigError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ConfigError("cannot rename to " + path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

// ---- binary tables ----

namespace {

constexpr char kMagic[4] = {'B', 'S', 'L', 'T'};
enum : std::uint32_t { kCavityKind = 1, kTrajectoryKind = 2 };

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ConfigError("truncated table file");
  return v;
}

template <class T>
void put_array(std::ostream& out, const std::vector<T>& v) {
  put<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
std::vector<T> get_array(std::istream& in, std::uint64_t limit) {
  const auto n = get<std::uint64_t>(in);
  if (n > limit) throw ConfigError("table file entry count out of range");
  std::vector<T> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw ConfigError("truncated table file");
  return v;
}

void put_header(std::ostream& out, std::uint32_t kind, const std::string& scope) {
  out.write(kMagic, 4);
  put(out, kTableFormatVersion);
  put(out, kind);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(scope.size()));
  out.write(scope.data(), static_cast<std::streamsize>(scope.size()));
}

void get_header(std::istream& in, std::uint32_t kind, std::string* scope) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw ConfigError("not a table file");
  if (get<std::uint32_t>(in) != kTableFormatVersion) throw ConfigError("unsupported table version");
  if (get<std::uint32_t>(in) != kind) throw ConfigError("table file holds a different table kind");
  const auto len = get<std::uint32_t>(in);
  if (len > 4096) throw ConfigError("table scope too long");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw ConfigError("truncated table file");
  if (scope) *scope = s;
}

}  // namespace

void write_table(std::ostream& out, const CavityTable& table, const std::string& scope) {
  put_header(out, kCavityKind, scope);
  put<std::int32_t>(out, table.horizon());
  put<std::int32_t>(out, table.obs_alphabet());
  put<std::int32_t>(out, table.action_alphabet());
  put<std::int32_t>(out, table.num_states());
  put_array(out, table.values());
}

CavityTable read_cavity_table(std::istream& in, std::string* scope) {
  get_header(in, kCavityKind, scope);
  const auto h = get<std::int32_t>(in);
  const auto b = get<std::int32_t>(in);
  const auto a = get<std::int32_t>(in);
  const auto s = get<std::int32_t>(in);
  if (h < 0 || b < 1 || a < 1 || s < 1) throw ConfigError("bad cavity table shape");
  CavityTable table(h, b, a, s);
  auto values = get_array<double>(in, table.values().size());
  if (values.size() != table.values().size()) throw ConfigError("cavity table size mismatch");
  table.values() = std::move(values);
  return table;
}

void write_table(std::ostream& out, const TrajectoryTable& table, const std::string& scope) {
  put_header(out, kTrajectoryKind, scope);
  put<std::int32_t>(out, table.horizon());
  put<std::int32_t>(out, table.num_neighbors());
  put<std::int32_t>(out, table.num_signals());
  put<std::int32_t>(out, table.obs_alphabet());
  put<std::int32_t>(out, table.action_alphabet());
  put_array(out, table.codes());
  put_array(out, table.offsets());
  std::vector<Code> codes;
  std::vector<double> probs;
  for (const auto& o : table.outcomes()) {
    codes.push_back(o.code);
    probs.push_back(o.prob);
  }
  put_array(out, codes);
  put_array(out, probs);
}

TrajectoryTable read_trajectory_table(std::istream& in, std::string* scope) {
  get_header(in, kTrajectoryKind, scope);
  const auto h = get<std::int32_t>(in);
  const auto k = get<std::int32_t>(in);
  const auto x = get<std::int32_t>(in);
  const auto b = get<std::int32_t>(in);
  const auto a = get<std::int32_t>(in);
  if (h < 0 || k < 0 || x < 1 || b < 1 || a < 1) throw ConfigError("bad decision table shape");
  TrajectoryTable table(h, k, x, b, a);
  const std::uint64_t limit = std::uint64_t{1} << 40;
  auto codes = get_array<Code>(in, limit);
  auto offsets = get_array<std::uint32_t>(in, limit);
  auto out_codes = get_array<Code>(in, limit);
  auto out_probs = get_array<double>(in, limit);
  if (out_codes.size() != out_probs.size()) throw ConfigError("decision table outcome mismatch");
  std::vector<TrajectoryTable::Outcome> outcomes;
  for (std::size_t i = 0; i < out_codes.size(); ++i) outcomes.push_back({out_codes[i], out_probs[i]});
  table.set_storage(std::move(codes), std::move(offsets), std::move(outcomes));
  return table;
}

Json to_json(const CavityTable& table, const std::string& scope) {
  Json doc;
  doc["kind"] = "cavity";
  doc["version"] = kTableFormatVersion;
  doc["scope"] = scope;
  doc["horizon"] = table.horizon();
  doc["obs_alphabet"] = table.obs_alphabet();
  doc["action_alphabet"] = table.action_alphabet();
  doc["states"] = table.num_states();
  doc["values"] = table.values();
  return doc;
}

Json to_json(const TrajectoryTable& table, const std::string& scope) {
  Json doc;
  doc["kind"] = "decision";
  doc["version"] = kTableFormatVersion;
  doc["scope"] = scope;
  doc["horizon"] = table.horizon();
  doc["neighbors"] = table.num_neighbors();
  doc["signals"] = table.num_signals();
  doc["obs_alphabet"] = table.obs_alphabet();
  doc["action_alphabet"] = table.action_alphabet();
  Json rows = Json::array();
  for (std::uint64_t i = 0; i < table.input_count(); ++i) {
    Json row = Json::array();
    table.for_each(i, [&](Code c, double p) { row.push_back({c, p}); });
    rows.push_back(row);
  }
  doc["rows"] = rows;
  return doc;
}

CavityTable cavity_table_from_json(const Json& doc) {
  if (field<std::string>(doc, "kind") != "cavity") throw ConfigError("not a cavity table");
  CavityTable table(field<int>(doc, "horizon"), field<int>(doc, "obs_alphabet"),
                    field<int>(doc, "action_alphabet"), field<int>(doc, "states"));
  auto values = field<std::vector<double>>(doc, "values");
  if (values.size() != table.values().size()) throw ConfigError("cavity table size mismatch");
  table.values() = std::move(values);
  return table;
}

TrajectoryTable trajectory_table_from_json(const Json& doc) {
  if (field<std::string>(doc, "kind") != "decision") throw ConfigError("not a decision table");
  TrajectoryTable table(field<int>(doc, "horizon"), field<int>(doc, "neighbors"),
                        field<int>(doc, "signals"), field<int>(doc, "obs_alphabet"),
                        field<int>(doc, "action_alphabet"));
  const auto& rows = doc.at("rows");
  if (rows.size() != table.input_count()) throw ConfigError("decision table row count mismatch");
  std::vector<TrajectoryTable::Outcome> row;
  for (const auto& r : rows) {
    row.clear();
    for (const auto& o : r) row.push_back({o[0].get<Code>(), o[1].get<double>()});
    table.append(row);
  }
  return table;
}

std::string to_csv(const RunResult& result) {
  std::ostringstream out;
  out << "node,round,errors,samples\n";
  for (std::size_t u = 0; u < result.samples.size(); ++u)
    for (std::size_t t = 0; t < result.samples[u].size(); ++t)
      if (result.samples[u][t] > 0)
        out << u << ',' << t << ',' << result.errors[u][t] << ',' << result.samples[u][t] << '\n';
  return out.str();
}

Json to_json(const RunResult& result) {
  Json doc;
  doc["seed"] = result.seed;
  doc["graph"] = result.graph;
  doc["rule"] = result.rule;
  doc["model_hash"] = result.model_hash;
  Json nodes = Json::array();
  for (std::size_t u = 0; u < result.samples.size(); ++u) {
    Json rounds = Json::array();
    for (std::size_t t = 0; t < result.samples[u].size(); ++t) {
      if (result.samples[u][t] == 0) continue;
      rounds.push_back({{"round", t},
                        {"errors", result.errors[u][t]},
                        {"samples", result.samples[u][t]},
                        {"rate", result.rate(static_cast<int>(u), static_cast<int>(t))}});
    }
    if (!rounds.empty()) nodes.push_back({{"node", u}, {"rounds", rounds}});
  }
  doc["nodes"] = nodes;
  return doc;
}

}  // namespace bsl
