#include "bsl/manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <memory>

namespace bsl {

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw InvariantError("SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

void RunManifest::write_output(const std::string& path, const std::string& content) {
  write_file_atomic(path, content);
  outputs.push_back({path, sha256_hex(content)});
}

Json RunManifest::to_json() const {
  Json doc;
  doc["command"] = command;
  doc["argv"] = argv;
  doc["config"] = config;
  doc["version"] = version;
  doc["elapsed_seconds"] = elapsed_seconds;
  doc["instability"] = instability;
  Json outs = Json::array();
  for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  doc["outputs"] = outs;
  return doc;
}

RunManifest RunManifest::from_json(const Json& doc) {
  RunManifest m;
  try {
    m.command = doc.at("command").get<std::string>();
    m.argv = doc.at("argv").get<std::vector<std::string>>();
    m.config = doc.at("config");
    m.version = doc.at("version").get<std::string>();
    m.elapsed_seconds = doc.at("elapsed_seconds").get<double>();
    m.instability = doc.at("instability").get<std::vector<std::string>>();
    for (const auto& o : doc.at("outputs"))
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

}  // namespace bsl
