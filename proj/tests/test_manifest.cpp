#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "mvembed/common.hpp"
#include "mvembed/manifest.hpp"

using namespace mvembed;
namespace fs = std::filesystem;

TEST_CASE("sha-256 known answers") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("manifest round trip") {
  const fs::path dir = fs::temp_directory_path() / ("mvembed_manifest_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  std::ofstream(dir / "input.tsv") << "abc";

  RunManifest m;
  m.command = "embed";
  m.config = {{"variant", "con"}, {"theta", 0.5}, {"dim", 256}};
  m.add_input(dir / "input.tsv");
  m.outputs = {"embedding.txt", "manifest.json"};
  CHECK(m.inputs.at(0).sha256 == sha256_hex("abc"));

  const std::string text = m.serialize();
  CHECK(text.back() == '\n');
  CHECK(RunManifest::parse(text) == m);
  CHECK(RunManifest::parse(text).serialize() == text);

  write_manifest(dir, m);
  CHECK(read_manifest(dir / std::string(kManifestName)) == m);
  fs::remove_all(dir);
}

TEST_CASE("malformed manifests are rejected") {
  CHECK_THROWS_AS(RunManifest::parse("{"), ValidationError);
  CHECK_THROWS_AS(RunManifest::parse("[1, 2]"), ValidationError);
  CHECK_THROWS_AS(RunManifest::parse(R"({"tool": "mvembed"})"), ValidationError);
}
