#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mvembed/embedding_io.hpp"
#include "mvembed/manifest.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = MVEMBED_CLI_PATH;

struct Workspace {
  fs::path root;
  Workspace() {
    root = fs::temp_directory_path() / ("mvembed_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
  fs::path operator/(const std::string& name) const { return root / name; }
};

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t manifests_in(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().filename() == mvembed::kManifestName;
  return n;
}

const std::string kSmallWalks = " --walks-mult 2 --walk-len 10 --neg 2";

}  // namespace

TEST_CASE("synth is reproducible and writes a manifest") {
  Workspace ws;
  REQUIRE(run("synth --p 0.2 --nodes-per-class 50 --seed 3 --out " + (ws / "a").string()) == 0);
  REQUIRE(run("synth --p 0.2 --nodes-per-class 50 --seed 3 --out " + (ws / "b").string()) == 0);
  CHECK(slurp(ws / "a" / "network.tsv") == slurp(ws / "b" / "network.tsv"));
  CHECK(slurp(ws / "a" / "labels.tsv") == slurp(ws / "b" / "labels.tsv"));
  CHECK(lines(ws / "a" / "labels.tsv").size() == 200);
  CHECK(manifests_in(ws / "a") == 1);
  auto m = mvembed::read_manifest(ws / "a" / "manifest.json");
  CHECK(m.command == "synth");
  CHECK(m.config.at("p").get<double>() == 0.2);
}

TEST_CASE("embed output shapes") {
  Workspace ws;
  REQUIRE(run("synth --p 0.1 --nodes-per-class 50 --seed 1 --out " + ws.root.string()) == 0);
  const std::string net = (ws / "network.tsv").string();

  REQUIRE(run("embed --network " + net + " --variant con --theta 0.5" + kSmallWalks + " --out " +
              (ws / "con").string()) == 0);
  auto con = mvembed::load_embedding(ws / "con" / "embedding.txt");
  CHECK(con.size() == 200);
  CHECK(con.dim == 256);
  CHECK(manifests_in(ws / "con") == 1);

  REQUIRE(run("embed --network " + net + " --variant one-space --dim 128 --format bin" + kSmallWalks + " --out " +
              (ws / "one").string()) == 0);
  auto one = mvembed::load_embedding(ws / "one" / "embedding.bin");
  CHECK(one.size() == 200);
  CHECK(one.dim == 128);

  REQUIRE(run("embed --network " + net + " --variant single-view --view v2" + kSmallWalks + " --out " +
              (ws / "single").string()) == 0);
  CHECK(mvembed::load_embedding(ws / "single" / "embedding.txt").dim == 128);

  // Same seed, same bytes.
  REQUIRE(run("embed --network " + net + " --variant con --theta 0.5" + kSmallWalks + " --out " +
              (ws / "con2").string()) == 0);
  CHECK(slurp(ws / "con" / "embedding.txt") == slurp(ws / "con2" / "embedding.txt"));
}

TEST_CASE("usage errors exit with status 2") {
  Workspace ws;
  REQUIRE(run("synth --p 0 --nodes-per-class 10 --out " + ws.root.string()) == 0);
  const std::string net = (ws / "network.tsv").string();
  const std::string out = " --out " + (ws / "x").string();
  CHECK(run("embed --network " + net + " --variant reg --theta 0.5" + out) == 2);
  CHECK(run("embed --network " + net + " --variant con --gamma 0.5" + out) == 2);
  CHECK(run("embed --network " + net + " --variant single-view" + out) == 2);
  CHECK(run("embed --network " + net + " --variant con --theta 1.5" + out) == 2);
  CHECK(run("embed --network " + net + " --variant bogus" + out) == 2);
  CHECK(run("synth --p 0.7" + out) == 2);
  CHECK(run("frobnicate") != 0);
  CHECK(run("embed --network " + (ws / "missing.tsv").string() + out) == 1);
}

TEST_CASE("jaccard on identical views") {
  Workspace ws;
  std::ofstream(ws / "net.tsv") << "a\t1\t2\na\t2\t3\na\t3\t1\nb\t1\t2\nb\t2\t3\nb\t3\t1\n";
  REQUIRE(run("jaccard --network " + (ws / "net.tsv").string() + " --threshold 0.5 --histogram --out " +
              (ws / "j").string()) == 0);
  auto rows = lines(ws / "j" / "agreement.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "view_a,view_b,threshold,proportion,n_nodes_considered");
  CHECK(rows[1] == "a,b,0.5,1,3");
  auto hist = lines(ws / "j" / "histogram.csv");
  CHECK(hist.size() == 21);
  CHECK(hist.back() == "a,b,0.95,1,3");
  CHECK(manifests_in(ws / "j") == 1);
}

TEST_CASE("eval and sweep tables") {
  Workspace ws;
  REQUIRE(run("synth --p 0 --nodes-per-class 40 --seed 2 --out " + ws.root.string()) == 0);
  const std::string net = (ws / "network.tsv").string();
  const std::string task = " --task multi-class --labels " + (ws / "labels.tsv").string();
  REQUIRE(run("embed --network " + net + " --variant independent" + kSmallWalks + " --out " + (ws / "e").string()) ==
          0);
  REQUIRE(run("eval --embedding " + (ws / "e" / "embedding.txt").string() + " --network " + net + task +
              " --runs 20 --model independent --out " + (ws / "r").string()) == 0);
  auto rows = lines(ws / "r" / "results.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("model,task,metric,mean,stderr,run_1,", 0) == 0);
  CHECK(rows[1].rfind("independent,multi-class,accuracy,", 0) == 0);
  CHECK(std::count(rows[1].begin(), rows[1].end(), ',') == 24);
  CHECK(manifests_in(ws / "r") == 1);

  REQUIRE(run("sweep --network " + net + " --variant con --param theta --values 0,0.25,0.5,0.75,1" + kSmallWalks +
              task + " --runs 2 --out " + (ws / "s").string()) == 0);
  auto sweep = lines(ws / "s" / "sweep.csv");
  REQUIRE(!sweep.empty());
  CHECK(sweep[0] == "variant,param,value,split,metric,mean,stderr");
  std::size_t test_accuracy_rows = 0;
  for (const auto& r : sweep) test_accuracy_rows += r.find(",test,accuracy,") != std::string::npos;
  CHECK(test_accuracy_rows == 5);
  CHECK(manifests_in(ws / "s") == 1);
}

TEST_CASE("convert merges per-view files") {
  Workspace ws;
  std::ofstream(ws / "a.txt") << "1 2\n2 3\n3 3\n";
  std::ofstream(ws / "b.txt") << "1\t3\t2.5\n";
  REQUIRE(run("convert --view-file a=" + (ws / "a.txt").string() + " --view-file b=" + (ws / "b.txt").string() +
              " --out " + (ws / "net.tsv").string()) == 0);
  auto rows = lines(ws / "net.tsv");
  CHECK(rows.size() == 3);
}
