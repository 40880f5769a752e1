#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mvembed {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kManifestName = "manifest.json";

struct InputDigest {
  std::string path;
  std::string sha256;
  bool operator==(const InputDigest&) const = default;
};

// Resolved configuration of one command invocation, stored next to its outputs.
struct RunManifest {
  std::string tool = "mvembed";
  std::string version{kToolVersion};
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<InputDigest> inputs;
  std::vector<std::string> outputs;

  bool operator==(const RunManifest&) const = default;

  void add_input(const std::filesystem::path& path);
  // Canonical text: sorted keys, two-space indent, trailing newline.
  std::string serialize() const;
  static RunManifest parse(std::string_view text);
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Writes `dir/manifest.json`.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace mvembed
