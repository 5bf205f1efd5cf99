#include "manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <json.hpp>

#include "serial/error.hpp"
#include "serial/netlist.hpp"

namespace serial::cli {

std::string sha256_file(const std::string& path) {
  const std::string bytes = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed for " + path);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "serial-rank";
  j["version"] = kToolVersion;
  j["subcommand"] = m.subcommand;
  j["flags"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : m.flags) j["flags"][name] = value;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& path : m.inputs) j["inputs"].push_back({{"path", path}, {"sha256", sha256_file(path)}});
  j["seeds"] = m.seeds;
  j["outputs"] = m.outputs;
  j["wall_time_s"] = m.wall_time_s;
  return j.dump(2) + "\n";
}

}  // namespace serial::cli
