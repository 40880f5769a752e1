#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mvembed/common.hpp"
#include "mvembed/graph.hpp"
#include "mvembed/protocol.hpp"

using namespace mvembed;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mvembed_protocol_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

// Points around one of `classes` axis directions.
EmbeddingTable clustered_table(std::size_t n, std::size_t classes, std::size_t dim, double noise, std::uint64_t seed,
                               std::vector<int>& labels) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  EmbeddingTable t;
  t.dim = dim;
  labels.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % classes);
    t.labels.push_back("n" + std::to_string(i));
    for (std::size_t k = 0; k < dim; ++k) t.values.push_back((k == static_cast<std::size_t>(c) ? 1.0 : 0.0) + g(rng));
    labels.push_back(c);
  }
  return t;
}

}  // namespace

TEST_CASE("normalization gives unit rows and keeps zero rows") {
  EmbeddingTable t{{"a", "b"}, 2, {3.0, 4.0, 0.0, 0.0}};
  CHECK(normalize_embeddings(t) == 1);
  CHECK(t.values[0] == doctest::Approx(0.6));
  CHECK(t.values[1] == doctest::Approx(0.8));
  CHECK(t.values[2] == 0.0);
  CHECK(t.values[3] == 0.0);
}

TEST_CASE("pair features are the element-wise product") {
  const std::vector<double> a{1.0, 2.0}, b{3.0, 4.0};
  CHECK(pair_features(a, b) == std::vector<double>{3.0, 8.0});
  CHECK_THROWS_AS(pair_features(a, std::vector<double>{1.0}), UsageError);
}

TEST_CASE("task spec parsing") {
  TempDir dir;
  std::istringstream in("# comment\ntask = link\nedges = friends.tsv\nnegatives = 3\nruns = 4\nseed = 9\n");
  auto spec = parse_task_spec(in, dir.path);
  CHECK(spec.kind == TaskKind::link_prediction);
  CHECK(spec.edges == dir.path / "friends.tsv");
  CHECK(spec.negatives == 3);
  CHECK(spec.runs == 4);
  CHECK(spec.seed == 9);

  std::istringstream mc("task = multi-class\nlabels = /abs/labels.tsv\nmulti_class_mode = one-vs-rest\n");
  auto spec2 = parse_task_spec(mc, dir.path);
  CHECK(spec2.labels == fs::path("/abs/labels.tsv"));
  CHECK(spec2.multi_class_mode == LogregMode::one_vs_rest);
  CHECK(spec2.runs == 20);

  auto parse = [&](const std::string& text) {
    std::istringstream s(text);
    return parse_task_spec(s);
  };
  CHECK_THROWS_AS(parse("task = link\nbogus = 1\n"), ParseError);
  CHECK_THROWS_AS(parse("task link\n"), ParseError);
  CHECK_THROWS_AS(parse("labels = x\n"), ConfigError);
  CHECK_THROWS_AS(parse("task = clustering\n"), ConfigError);
  CHECK_THROWS_AS(parse("task = link\n"), ConfigError);
  CHECK_THROWS_AS(parse("task = multi-label\nlabels = x\nruns = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("task = multi-label\nlabels = x\nruns = -1\n"), ParseError);
}

TEST_CASE("splits are disjoint, complete, 80/10/10 and seeded") {
  for (std::size_t n : {10u, 37u, 1000u}) {
    auto s = shuffle_split(n, 5);
    CHECK(s.train.size() == n * 8 / 10);
    CHECK(s.validation.size() == n / 10);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.validation.begin(), s.validation.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == n);
    CHECK(*all.rbegin() == n - 1);
    auto again = shuffle_split(n, 5);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);
  }
  CHECK(shuffle_split(1000, 5).train != shuffle_split(1000, 6).train);
}

TEST_CASE("multi-class protocol on separable clusters") {
  std::vector<int> labels;
  auto table = clustered_table(300, 3, 6, 0.1, 1, labels);
  ProtocolOptions opt;
  opt.threads = 2;
  auto result = run_multiclass_protocol(table, labels, 3, 5, 11, opt);
  const auto& acc = result.test_metric("accuracy");
  REQUIRE(acc.runs.size() == 5);
  CHECK(acc.mean() > 0.95);
  CHECK(result.chosen_l2.size() == 5);
  CHECK(result.nodes_evaluated == 300);

  // The thread count does not change the per-run values.
  opt.threads = 1;
  auto serial = run_multiclass_protocol(table, labels, 3, 5, 11, opt);
  CHECK(serial.test_metric("accuracy").runs == acc.runs);

  // Recomputing the summary from the run values.
  double mean = 0.0;
  for (double v : acc.runs) mean += v;
  mean /= 5.0;
  double ss = 0.0;
  for (double v : acc.runs) ss += (v - mean) * (v - mean);
  CHECK(acc.mean() == doctest::Approx(mean));
  CHECK(acc.standard_error() == doctest::Approx(std::sqrt(ss / 4.0) / std::sqrt(5.0)));
}

TEST_CASE("random labels stay near chance") {
  std::vector<int> labels;
  auto table = clustered_table(400, 2, 4, 1.0, 2, labels);
  std::mt19937_64 rng(3);
  std::shuffle(labels.begin(), labels.end(), rng);
  auto result = run_multiclass_protocol(table, labels, 2, 5, 1);
  CHECK(std::abs(result.test_metric("accuracy").mean() - 0.5) < 0.15);
}

TEST_CASE("file-based tasks and isolated-node exclusion") {
  TempDir dir;
  std::vector<int> labels;
  auto table = clustered_table(200, 2, 4, 0.2, 4, labels);

  std::string class_text, label_text, edge_text, network_text;
  for (std::size_t i = 0; i < table.size(); ++i) {
    class_text += table.labels[i] + "\tc" + std::to_string(labels[i]) + "\n";
    label_text += table.labels[i] + "\tl" + std::to_string(labels[i]) + "\n";
    if (i % 3 == 0) label_text += table.labels[i] + "\textra\n";
  }
  // Friends share a class.
  for (std::size_t i = 0; i + 2 < table.size(); ++i) edge_text += table.labels[i] + "\t" + table.labels[i + 2] + "\n";
  // Two views; node n0 only appears in the first.
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    network_text += "a\t" + table.labels[i] + "\t" + table.labels[i + 1] + "\n";
    if (i > 0) network_text += "b\t" + table.labels[i] + "\t" + table.labels[i + 1] + "\n";
  }
  std::istringstream net_in(network_text);
  auto net = read_network(net_in);

  TaskSpec mc;
  mc.kind = TaskKind::multi_class;
  mc.labels = dir.write("classes.tsv", class_text);
  mc.runs = 3;
  auto r = run_protocol(table, mc, &net);
  CHECK(r.nodes_evaluated == 199);
  CHECK(r.test_metric("accuracy").mean() > 0.9);
  CHECK(run_protocol(table, mc, nullptr).nodes_evaluated == 200);

  TaskSpec ml;
  ml.kind = TaskKind::multi_label;
  ml.labels = dir.write("labels.tsv", label_text);
  ml.runs = 3;
  auto rl = run_protocol(table, ml, &net);
  CHECK(rl.test_metric("roc_auc").runs.size() == 3);
  CHECK(rl.test_metric("auprc").runs.size() == 3);
  CHECK_THROWS_AS(rl.test_metric("accuracy"), UsageError);

  TaskSpec lp;
  lp.kind = TaskKind::link_prediction;
  lp.edges = dir.write("edges.tsv", edge_text);
  lp.runs = 3;
  auto rp = run_protocol(table, lp, &net);
  const auto& auc = rp.test_metric("roc_auc");
  CHECK(auc.runs.size() == 3);
  CHECK(auc.mean() > 0.6);
  for (double v : rp.test_metric("auprc").runs) CHECK((v >= 0.0 && v <= 1.0));

  std::ostringstream out;
  write_results_header(out, 3);
  write_results(out, "model", rp);
  std::istringstream lines(out.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "model,task,metric,mean,stderr,run_1,run_2,run_3");
  CHECK(first.rfind("model,link,roc_auc,", 0) == 0);
  CHECK(std::count(first.begin(), first.end(), ',') == 7);
}
