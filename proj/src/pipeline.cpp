#include "mvembed/pipeline.hpp"

namespace mvembed {

EmbedResult embed(const MultiViewNetwork& net, const EmbedConfig& cfg, std::ostream* walk_dump) {
  cfg.train.validate();
  const MultiViewNetwork* source = &net;
  MultiViewNetwork derived;
  switch (cfg.train.variant) {
    case Variant::view_merging:
      derived = merge_views(net);
      source = &derived;
      break;
    case Variant::single_view:
      if (!cfg.view) throw UsageError("single-view needs a view to keep");
      derived = select_view(net, *cfg.view);
      source = &derived;
      break;
    default:
      if (cfg.view) throw UsageError("a view can only be chosen for single-view");
      break;
  }

  WalkConfig walk = cfg.walk;
  walk.seed = cfg.train.seed;
  walk.threads = cfg.train.threads;
  auto corpus = build_corpus(*source, walk, walk_dump);

  const std::size_t dim = cfg.train.resolved_dim(net.num_views());
  EmbeddingStore store(*source, cfg.train.variant, dim, cfg.train.seed);
  EmbedResult result;
  result.stats = train(store, corpus.pairs, corpus.noise, cfg.train);
  result.table = final_embedding(store, *source);
  result.num_pairs = corpus.pairs.size();
  result.walks_per_view = corpus.walks_per_view;
  return result;
}

}  // namespace mvembed
