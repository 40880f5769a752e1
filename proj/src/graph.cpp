#include "mvembed/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace mvembed {

std::uint32_t Dictionary::intern(std::string_view label) {
  auto it = index_.find(std::string(label));
  if (it != index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(labels_.size());
  labels_.emplace_back(label);
  index_.emplace(labels_.back(), id);
  return id;
}

std::optional<std::uint32_t> Dictionary::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ViewAdjacency::ViewAdjacency(std::vector<std::size_t> offsets, std::vector<NodeId> neighbors,
                             std::vector<double> weights)
    : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)), weights_(std::move(weights)) {
  double twice = 0.0;
  for (double w : weights_) twice += w;
  total_weight_ = twice / 2.0;
}

double ViewAdjacency::weight(NodeId u, NodeId w) const {
  auto nbrs = neighbors(u);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), w);
  if (it == nbrs.end() || *it != w) return 0.0;
  return weights(u)[static_cast<std::size_t>(it - nbrs.begin())];
}

MultiViewNetwork::MultiViewNetwork(Dictionary nodes, Dictionary views, std::vector<ViewAdjacency> adjacency)
    : nodes_(std::move(nodes)), views_(std::move(views)), adjacency_(std::move(adjacency)) {}

std::uint32_t MultiViewNetwork::active_view_count(NodeId u) const {
  std::uint32_t count = 0;
  for (const auto& adj : adjacency_) count += adj.degree(u) > 0 ? 1U : 0U;
  return count;
}

std::size_t MultiViewNetwork::total_edges() const {
  std::size_t total = 0;
  for (const auto& adj : adjacency_) total += adj.num_edges();
  return total;
}

ViewId NetworkBuilder::add_view(std::string_view name) {
  ViewId v = views_.intern(name);
  if (edges_.size() <= v) edges_.resize(v + 1);
  return v;
}

void NetworkBuilder::add_edge(std::string_view view, std::string_view src, std::string_view dst, double weight) {
  ViewId v = add_view(view);
  NodeId a = nodes_.intern(src);
  NodeId b = nodes_.intern(dst);
  add_edge(v, a, b, weight);
}

void NetworkBuilder::add_edge(ViewId view, NodeId src, NodeId dst, double weight) {
  if (view >= edges_.size()) throw UsageError("unknown view id " + std::to_string(view));
  if (src >= nodes_.size() || dst >= nodes_.size()) throw UsageError("unknown node id");
  if (src == dst) throw ValidationError("self-loop on node '" + nodes_.label(src) + "'");
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw ValidationError("edge weight must be positive and finite");
  }
  edges_[view][{std::min(src, dst), std::max(src, dst)}] += weight;
}

void NetworkBuilder::binarize() {
  for (auto& view : edges_)
    for (auto& [key, w] : view) w = 1.0;
}

MultiViewNetwork NetworkBuilder::build() const {
  const std::size_t n = nodes_.size();
  std::vector<ViewAdjacency> adjacency;
  adjacency.reserve(edges_.size());
  for (const auto& view : edges_) {
    std::vector<std::size_t> offsets(n + 1, 0);
    for (const auto& [key, w] : view) {
      ++offsets[key.first + 1];
      ++offsets[key.second + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    std::vector<NodeId> nbrs(offsets[n]);
    std::vector<double> weights(offsets[n]);
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    // Keys iterate in (low, high) order, so row u receives its lower neighbors in
    // ascending order before its higher ones: every row ends up sorted.
    for (const auto& [key, w] : view) {
      auto [a, b] = key;
      nbrs[cursor[a]] = b;
      weights[cursor[a]++] = w;
      nbrs[cursor[b]] = a;
      weights[cursor[b]++] = w;
    }
    adjacency.emplace_back(std::move(offsets), std::move(nbrs), std::move(weights));
  }
  return MultiViewNetwork(nodes_, views_, std::move(adjacency));
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

MultiViewNetwork read_network(std::istream& in, const LoadOptions& options, const std::string& source) {
  NetworkBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError(source, line_no, "expected view<TAB>src<TAB>dst[<TAB>weight], got " +
                                            std::to_string(fields.size()) + " fields");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (fields[i].empty()) throw ParseError(source, line_no, "empty field");
    }
    double weight = 1.0;
    if (fields.size() == 4) {
      auto f = fields[3];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), weight);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(source, line_no, "invalid weight '" + std::string(f) + "'");
      }
    }
    if (fields[1] == fields[2]) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": self-loop on node '" +
                            std::string(fields[1]) + "'");
    }
    if (!(weight > 0.0) || !std::isfinite(weight)) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": non-positive weight " +
                            std::string(fields[3]));
    }
    builder.add_edge(fields[0], fields[1], fields[2], weight);
  }
  if (options.binarize) builder.binarize();
  return builder.build();
}

MultiViewNetwork load_network(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open network file " + path.string());
  return read_network(in, options, path.string());
}

void write_network(std::ostream& out, const MultiViewNetwork& net) {
  char buf[64];
  for (ViewId v = 0; v < net.num_views(); ++v) {
    const auto& adj = net.view(v);
    for (NodeId u = 0; u < net.num_nodes(); ++u) {
      auto nbrs = adj.neighbors(u);
      auto ws = adj.weights(u);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        if (nbrs[k] <= u) continue;
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), ws[k]);
        out << net.view_name(v) << '\t' << net.node_label(u) << '\t' << net.node_label(nbrs[k]) << '\t'
            << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
      }
    }
  }
}

void save_network(const std::filesystem::path& path, const MultiViewNetwork& net) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write network file " + path.string());
  write_network(out, net);
}

void write_node_dictionary(std::ostream& out, const MultiViewNetwork& net) {
  for (NodeId u = 0; u < net.num_nodes(); ++u) out << u << '\t' << net.node_label(u) << '\n';
}

std::size_t non_isolated_count(const MultiViewNetwork& net, ViewId v) {
  const auto& adj = net.view(v);
  std::size_t count = 0;
  for (NodeId u = 0; u < net.num_nodes(); ++u) count += adj.degree(u) > 0 ? 1 : 0;
  return count;
}

MultiViewNetwork merge_views(const MultiViewNetwork& net, std::string_view merged_name) {
  NetworkBuilder builder;
  for (const auto& label : net.nodes().labels()) builder.add_node(label);
  ViewId merged = builder.add_view(merged_name);
  bool any = false;
  for (ViewId v = 0; v < net.num_views(); ++v) {
    const auto& adj = net.view(v);
    if (adj.num_edges() == 0) continue;
    any = true;
    const double scale = 1.0 / adj.total_weight();
    for (NodeId u = 0; u < net.num_nodes(); ++u) {
      auto nbrs = adj.neighbors(u);
      auto ws = adj.weights(u);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        if (nbrs[k] > u) builder.add_edge(merged, u, nbrs[k], ws[k] * scale);
      }
    }
  }
  if (!any) throw ValidationError("cannot merge views: every view is empty");
  return builder.build();
}

MultiViewNetwork select_view(const MultiViewNetwork& net, ViewId v) {
  if (v >= net.num_views()) throw UsageError("view id out of range");
  NetworkBuilder builder;
  for (const auto& label : net.nodes().labels()) builder.add_node(label);
  ViewId only = builder.add_view(net.view_name(v));
  const auto& adj = net.view(v);
  for (NodeId u = 0; u < net.num_nodes(); ++u) {
    auto nbrs = adj.neighbors(u);
    auto ws = adj.weights(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (nbrs[k] > u) builder.add_edge(only, u, nbrs[k], ws[k]);
    }
  }
  return builder.build();
}

}  // namespace mvembed
