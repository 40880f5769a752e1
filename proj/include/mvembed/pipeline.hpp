#pragma once

#include <iosfwd>
#include <optional>

#include "mvembed/embedding.hpp"
#include "mvembed/graph.hpp"
#include "mvembed/trainer.hpp"
#include "mvembed/walks.hpp"

namespace mvembed {

struct EmbedConfig {
  TrainConfig train;
  WalkConfig walk;
  // single-view: which view to keep.
  std::optional<ViewId> view;
};

struct EmbedResult {
  EmbeddingTable table;
  TrainStats stats;
  std::size_t num_pairs = 0;
  std::size_t walks_per_view = 0;
};

// load -> (merge / select view) -> walks -> pairs -> train -> final embedding.
// The walk seed and thread count follow the training config.
EmbedResult embed(const MultiViewNetwork& net, const EmbedConfig& cfg, std::ostream* walk_dump = nullptr);

}  // namespace mvembed
