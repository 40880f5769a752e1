#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mvembed/alias_table.hpp"
#include "mvembed/common.hpp"
#include "mvembed/graph.hpp"

namespace mvembed {

struct WalkConfig {
  std::uint32_t walk_length = 20;     // nodes per walk (L)
  std::uint32_t window = 3;           // B
  std::uint32_t walks_multiplier = 50;  // M
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

// Fixed-length walks stored back to back.
struct WalkSet {
  ViewId view = 0;
  std::uint32_t length = 0;
  std::vector<NodeId> nodes;

  std::size_t size() const noexcept { return length == 0 ? 0 : nodes.size() / length; }
  std::span<const NodeId> walk(std::size_t i) const { return {nodes.data() + i * length, length}; }
};

struct WalkPair {
  NodeId center;
  NodeId context;
  ViewId view;

  friend bool operator==(const WalkPair&, const WalkPair&) = default;
};

using PairList = std::vector<WalkPair>;

// N = M * max_v n^(v); identical for every view.
std::size_t walk_budget(const MultiViewNetwork& net, const WalkConfig& cfg);

// How many walks each node starts in view v: floor/ceil split of N over the
// non-isolated nodes, ceil going to the first (N mod n) in a seeded shuffle.
std::vector<std::uint32_t> start_counts(const MultiViewNetwork& net, ViewId v, std::size_t total_walks,
                                        std::uint64_t seed);

// Exactly `total_walks` weight-proportional walks inside view v, ordered by start node.
WalkSet generate_walks(const MultiViewNetwork& net, ViewId v, std::size_t total_walks, const WalkConfig& cfg);

// (walk[i], walk[j]) for every j != i with |i - j| <= window, in walk order.
PairList extract_pairs(const WalkSet& walks, std::uint32_t window);

// Concatenates lists in view order, then applies one seeded uniform shuffle.
PairList merge_and_shuffle(std::vector<PairList> lists, std::uint64_t seed);

// Per-view negative-sampling distribution P(u) ~ D_u^{3/4}, D_u = occurrences of u in W^(v).
class NoiseTable {
 public:
  NoiseTable() = default;
  NoiseTable(std::span<const WalkPair> pairs, std::size_t num_nodes);
  // Builds directly from occurrence counts (indexed by node id).
  static NoiseTable from_counts(std::span<const std::uint64_t> counts);

  template <class Rng>
  NodeId sample(Rng& rng) const {
    return support_[alias_.sample(rng)];
  }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  // Exact probability of drawing u.
  double probability(NodeId u) const;

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<NodeId> support_;
  std::vector<double> masses_;
  double total_mass_ = 0.0;
  AliasTable alias_;
};

// Everything the trainer consumes: the merged list W and one noise table per view.
struct TrainingCorpus {
  PairList pairs;
  std::vector<NoiseTable> noise;
  std::size_t walks_per_view = 0;
};

TrainingCorpus build_corpus(const MultiViewNetwork& net, const WalkConfig& cfg, std::ostream* walk_dump = nullptr);

// One walk per line, space-separated node labels.
void dump_walks(std::ostream& out, const MultiViewNetwork& net, const WalkSet& walks);

}  // namespace mvembed
