#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mvembed/common.hpp"

namespace mvembed {

// Bijection between external string labels and dense ids.
class Dictionary {
 public:
  // Returns the id of `label`, inserting it if unseen.
  std::uint32_t intern(std::string_view label);
  std::optional<std::uint32_t> find(std::string_view label) const;
  const std::string& label(std::uint32_t id) const { return labels_.at(id); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct Neighbor {
  NodeId node;
  double weight;
};

// Symmetric weighted adjacency of one view in CSR form; neighbors sorted by id.
class ViewAdjacency {
 public:
  ViewAdjacency() = default;
  ViewAdjacency(std::vector<std::size_t> offsets, std::vector<NodeId> neighbors,
                std::vector<double> weights);

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const NodeId> neighbors(NodeId u) const {
    return {neighbors_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::span<const double> weights(NodeId u) const {
    return {weights_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  // Weight of edge (u, w), or 0 when absent.
  double weight(NodeId u, NodeId w) const;
  // Undirected edge count (each edge once).
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }
  // Sum of undirected edge weights (each edge once).
  double total_weight() const noexcept { return total_weight_; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<double> weights_;
  double total_weight_ = 0.0;
};

// One node set with several undirected weighted edge sets. Immutable once built.
class MultiViewNetwork {
 public:
  MultiViewNetwork() = default;
  MultiViewNetwork(Dictionary nodes, Dictionary views, std::vector<ViewAdjacency> adjacency);

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_views() const noexcept { return views_.size(); }
  const Dictionary& nodes() const noexcept { return nodes_; }
  const Dictionary& views() const noexcept { return views_; }
  const ViewAdjacency& view(ViewId v) const { return adjacency_.at(v); }
  const std::string& node_label(NodeId u) const { return nodes_.label(u); }
  const std::string& view_name(ViewId v) const { return views_.label(v); }

  bool has_edges(NodeId u, ViewId v) const { return adjacency_[v].degree(u) > 0; }
  // Number of views in which u has at least one edge.
  std::uint32_t active_view_count(NodeId u) const;
  std::size_t total_edges() const;

 private:
  Dictionary nodes_;
  Dictionary views_;
  std::vector<ViewAdjacency> adjacency_;
};

// Accumulates undirected edges; duplicates sum their weights, self-loops are rejected.
class NetworkBuilder {
 public:
  NodeId add_node(std::string_view label) { return nodes_.intern(label); }
  ViewId add_view(std::string_view name);
  void add_edge(std::string_view view, std::string_view src, std::string_view dst, double weight = 1.0);
  void add_edge(ViewId view, NodeId src, NodeId dst, double weight = 1.0);
  // Replace every accumulated weight by 1.0.
  void binarize();
  MultiViewNetwork build() const;

 private:
  Dictionary nodes_;
  Dictionary views_;
  std::vector<std::map<std::pair<NodeId, NodeId>, double>> edges_;
};

struct LoadOptions {
  bool binarize = false;
};

// Parses `view<TAB>src<TAB>dst[<TAB>weight]` lines; '#' lines and blank lines are skipped.
MultiViewNetwork read_network(std::istream& in, const LoadOptions& options = {},
                              const std::string& source = "<stream>");
MultiViewNetwork load_network(const std::filesystem::path& path, const LoadOptions& options = {});

// Canonical edge list: views in id order, each undirected edge once as (lower id, higher id).
void write_network(std::ostream& out, const MultiViewNetwork& net);
void save_network(const std::filesystem::path& path, const MultiViewNetwork& net);
// `node_id<TAB>label` per node.
void write_node_dictionary(std::ostream& out, const MultiViewNetwork& net);

std::size_t non_isolated_count(const MultiViewNetwork& net, ViewId v);

// Rescales each view to total weight 1.0 and sums all views into a single view.
MultiViewNetwork merge_views(const MultiViewNetwork& net, std::string_view merged_name = "merged");

// Keeps only view `v`; node ids are preserved.
MultiViewNetwork select_view(const MultiViewNetwork& net, ViewId v);

}  // namespace mvembed
