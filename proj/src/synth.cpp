#include "mvembed/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <string>

namespace mvembed {

void SynthConfig::validate() const {
  if (!(p >= 0.0 && p <= 0.5)) throw ConfigError("intrusion probability must lie in [0, 0.5]");
  if (nodes_per_class < 2) throw ConfigError("nodes_per_class must be at least 2");
  if (m == 0) throw ConfigError("m must be positive");
}

namespace {

// Returns the undirected edges of a preferential-attachment graph over `order`.
std::vector<std::pair<NodeId, NodeId>> attach(const std::vector<NodeId>& order, std::uint32_t m,
                                              std::mt19937_64& rng) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  // Every edge endpoint once; uniform draws from it are degree-proportional.
  std::vector<NodeId> endpoints;
  edges.emplace_back(order[0], order[1]);
  endpoints.push_back(order[0]);
  endpoints.push_back(order[1]);
  std::vector<NodeId> targets;
  for (std::size_t i = 2; i < order.size(); ++i) {
    const std::size_t want = std::min<std::size_t>(m, i);
    targets.clear();
    while (targets.size() < want) {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      const NodeId t = endpoints[pick(rng)];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.emplace_back(order[i], t);
      endpoints.push_back(order[i]);
      endpoints.push_back(t);
    }
  }
  return edges;
}

}  // namespace

LabeledNetwork generate(const SynthConfig& cfg) {
  cfg.validate();
  const std::uint32_t n = cfg.nodes_per_class;
  NetworkBuilder builder;
  LabeledNetwork out;
  out.labels.resize(4 * static_cast<std::size_t>(n));
  for (std::uint32_t c = 0; c < 4; ++c)
    for (std::uint32_t i = 0; i < n; ++i) {
      const NodeId id = builder.add_node(std::to_string(c * n + i));
      out.labels[id] = static_cast<std::uint8_t>(c);
    }
  const ViewId v1 = builder.add_view("v1");
  const ViewId v2 = builder.add_view("v2");

  std::mt19937_64 rng(derive_seed(cfg.seed, 0x53594e));
  auto members = [n](std::uint32_t c) {
    std::vector<NodeId> ids(n);
    for (std::uint32_t i = 0; i < n; ++i) ids[i] = c * n + i;
    return ids;
  };
  struct Component {
    std::uint32_t a, b;
    ViewId home;
  };
  const Component components[] = {{0, 1, v1}, {2, 3, v1}, {0, 2, v2}, {1, 3, v2}};
  std::bernoulli_distribution intrude(cfg.p);
  for (const auto& comp : components) {
    auto order = members(comp.a);
    auto second = members(comp.b);
    order.insert(order.end(), second.begin(), second.end());
    std::shuffle(order.begin(), order.end(), rng);
    for (auto [u, w] : attach(order, cfg.m, rng)) {
      ViewId target = comp.home;
      if (intrude(rng)) {
        target = comp.home == v1 ? v2 : v1;
        ++out.intruded_edges;
      }
      builder.add_edge(target, u, w);
      ++out.generated_edges;
    }
  }
  out.net = builder.build();
  return out;
}

std::vector<SynthConfig> default_series(std::uint64_t base_seed) {
  std::vector<SynthConfig> series;
  for (int i = 0; i <= 5; ++i) {
    SynthConfig cfg;
    cfg.p = i / 10.0;
    cfg.seed = derive_seed(base_seed, static_cast<std::uint64_t>(i));
    series.push_back(cfg);
  }
  return series;
}

void write_labels(std::ostream& out, const LabeledNetwork& data) {
  for (NodeId u = 0; u < data.labels.size(); ++u)
    out << data.net.node_label(u) << '\t' << kSynthClasses[data.labels[u]] << '\n';
}

void save_labels(const std::filesystem::path& path, const LabeledNetwork& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_labels(out, data);
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace mvembed
