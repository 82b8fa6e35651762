#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bsl/cavity.hpp"
#include "bsl/sim.hpp"
#include "bsl/trees.hpp"

namespace bsl {

using Json = nlohmann::json;

/// Model document: {"states", "signals", "prior", "likelihood", "tie_break",
/// "noise", optional "utility" rows and "signal_to_action"}. "noise" is the
/// binary symmetric shorthand.
AgentModel parse_model(const Json& doc);
Json to_json(const AgentModel& model);

/// {"n", "edges", "directed_edges", "hubs"}
Graph parse_graph(const Json& doc);
Json to_json(const Graph& graph);

/// {"support", "probs"}
DegreeDistribution parse_degree_distribution(const Json& doc);

Json read_json_file(const std::string& path);
/// Writes via a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Scientific notation with 17 significant digits.
std::string format_double(double v);

/// Versioned binary table format: magic, version, kind, scope, shape, then the
/// dense arrays in index order.
inline constexpr std::uint32_t kTableFormatVersion = 1;
void write_table(std::ostream& out, const CavityTable& table, const std::string& scope);
void write_table(std::ostream& out, const TrajectoryTable& table, const std::string& scope);
CavityTable read_cavity_table(std::istream& in, std::string* scope = nullptr);
TrajectoryTable read_trajectory_table(std::istream& in, std::string* scope = nullptr);

/// JSON forms, meant for small horizons.
Json to_json(const CavityTable& table, const std::string& scope);
Json to_json(const TrajectoryTable& table, const std::string& scope);
CavityTable cavity_table_from_json(const Json& doc);
TrajectoryTable trajectory_table_from_json(const Json& doc);

/// node,round,errors,samples (nodes and rounds without samples are skipped).
std::string to_csv(const RunResult& result);
Json to_json(const RunResult& result);

}  // namespace bsl
