#include "tacsim_cli/manifest.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "tacsim/error.hpp"
#include "tacsim/version.hpp"

namespace tacsim::cli {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::Io, "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read '" + path.string() + "'");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return sha256_hex(bytes.str());
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.emplace_back(path.string(), file_sha256(path));
}

void RunManifest::add_artifact(const std::filesystem::path& path) {
  artifacts.emplace_back(path.string(), file_sha256(path));
}

std::string RunManifest::to_json() const {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["tool"] = "tacsim";
  doc["version"] = std::string(kVersion);
  doc["command"] = command;
  ojson args = ojson::object();
  for (const auto& [k, v] : arguments) args[k] = v;
  doc["arguments"] = std::move(args);
  doc["root_seed"] = root_seed;
  doc["config"] = config_text;
  auto files = [](const auto& list) {
    ojson arr = ojson::array();
    for (const auto& [p, d] : list) arr.push_back({{"path", p}, {"sha256", d}});
    return arr;
  };
  doc["inputs"] = files(inputs);
  doc["artifacts"] = files(artifacts);
  return doc.dump(2) + '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace tacsim::cli
