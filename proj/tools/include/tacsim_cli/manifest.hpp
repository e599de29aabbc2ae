#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace tacsim::cli {

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);

/// Everything needed to rerun a command and check its outputs.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> arguments;
  std::uint64_t root_seed = 0;
  std::string config_text;
  std::vector<std::pair<std::string, std::string>> inputs;     // path, sha256
  std::vector<std::pair<std::string, std::string>> artifacts;  // path, sha256

  void add_input(const std::filesystem::path& path);
  void add_artifact(const std::filesystem::path& path);
  std::string to_json() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tacsim::cli
