#pragma once

#include <string>
#include <vector>

#include "bsl/io.hpp"

namespace bsl {

inline constexpr const char* kToolVersion = "0.1.0";

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

struct OutputDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;               ///< subcommand name
  std::vector<std::string> argv;     ///< full invocation, enough to rerun it
  Json config = Json::object();
  std::string version = kToolVersion;
  double elapsed_seconds = 0.0;
  std::vector<std::string> instability;  ///< human-readable flagged entries
  std::vector<OutputDigest> outputs;

  /// Writes `content` atomically and records its digest.
  void write_output(const std::string& path, const std::string& content);
  Json to_json() const;
  static RunManifest from_json(const Json& doc);
};

}  // namespace bsl
