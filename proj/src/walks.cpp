#include "mvembed/walks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

namespace mvembed {

void WalkConfig::validate() const {
  if (walk_length < 2) throw ConfigError("walk length must be >= 2");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (walks_multiplier < 1) throw ConfigError("walks multiplier must be >= 1");
  if (threads < 1) throw ConfigError("thread count must be >= 1");
}

std::size_t walk_budget(const MultiViewNetwork& net, const WalkConfig& cfg) {
  std::size_t n_max = 0;
  for (ViewId v = 0; v < net.num_views(); ++v) n_max = std::max(n_max, non_isolated_count(net, v));
  if (n_max == 0) throw ValidationError("walk budget undefined: every view is empty");
  return static_cast<std::size_t>(cfg.walks_multiplier) * n_max;
}

std::vector<std::uint32_t> start_counts(const MultiViewNetwork& net, ViewId v, std::size_t total_walks,
                                        std::uint64_t seed) {
  const auto& adj = net.view(v);
  std::vector<NodeId> active;
  for (NodeId u = 0; u < net.num_nodes(); ++u)
    if (adj.degree(u) > 0) active.push_back(u);
  if (active.empty()) throw ValidationError("view '" + net.view_name(v) + "' has no edges");

  std::mt19937_64 rng(derive_seed(seed, 0x5741'4c4bULL, v));
  std::shuffle(active.begin(), active.end(), rng);
  const std::size_t base = total_walks / active.size();
  const std::size_t extra = total_walks % active.size();
  std::vector<std::uint32_t> counts(net.num_nodes(), 0);
  for (std::size_t i = 0; i < active.size(); ++i)
    counts[active[i]] = static_cast<std::uint32_t>(base + (i < extra ? 1 : 0));
  return counts;
}

namespace {

std::vector<AliasTable> transition_tables(const ViewAdjacency& adj, std::size_t num_nodes) {
  std::vector<AliasTable> tables(num_nodes);
  for (NodeId u = 0; u < num_nodes; ++u) {
    if (adj.degree(u) > 0) tables[u] = AliasTable(adj.weights(u));
  }
  return tables;
}

}  // namespace

WalkSet generate_walks(const MultiViewNetwork& net, ViewId v, std::size_t total_walks, const WalkConfig& cfg) {
  cfg.validate();
  const auto& adj = net.view(v);
  const std::size_t n = net.num_nodes();
  auto counts = start_counts(net, v, total_walks, cfg.seed);
  auto tables = transition_tables(adj, n);

  std::vector<std::size_t> first(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) first[u + 1] = first[u] + counts[u];

  WalkSet out;
  out.view = v;
  out.length = cfg.walk_length;
  out.nodes.resize(total_walks * cfg.walk_length);

  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t u = lo; u < hi; ++u) {
      if (counts[u] == 0) continue;
      std::mt19937_64 rng(derive_seed(cfg.seed, v + 1, u));
      for (std::size_t w = first[u]; w < first[u + 1]; ++w) {
        NodeId* walk = out.nodes.data() + w * cfg.walk_length;
        NodeId cur = static_cast<NodeId>(u);
        walk[0] = cur;
        for (std::uint32_t step = 1; step < cfg.walk_length; ++step) {
          cur = adj.neighbors(cur)[tables[cur].sample(rng)];
          walk[step] = cur;
        }
      }
    }
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(cfg.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, n * t / threads, n * (t + 1) / threads);
    for (auto& th : pool) th.join();
  }
  return out;
}

PairList extract_pairs(const WalkSet& walks, std::uint32_t window) {
  if (walks.size() == 0) throw ValidationError("no walks to extract pairs from");
  if (window < 1) throw ConfigError("window must be >= 1");
  PairList pairs;
  const std::size_t len = walks.length;
  std::size_t per_walk = 0;
  for (std::size_t i = 0; i < len; ++i) {
    std::size_t lo = i >= window ? i - window : 0;
    std::size_t hi = std::min(len - 1, i + window);
    per_walk += hi - lo;
  }
  pairs.reserve(per_walk * walks.size());
  for (std::size_t w = 0; w < walks.size(); ++w) {
    auto walk = walks.walk(w);
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t lo = i >= window ? i - window : 0;
      std::size_t hi = std::min(len - 1, i + window);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i) pairs.push_back({walk[i], walk[j], walks.view});
      }
    }
  }
  return pairs;
}

PairList merge_and_shuffle(std::vector<PairList> lists, std::uint64_t seed) {
  std::size_t total = 0;
  for (const auto& l : lists) total += l.size();
  if (total == 0) throw ValidationError("cannot merge empty pair lists");
  PairList merged;
  merged.reserve(total);
  for (auto& l : lists) {
    merged.insert(merged.end(), l.begin(), l.end());
    PairList().swap(l);
  }
  std::mt19937_64 rng(derive_seed(seed, 0x5348'5546ULL));
  std::shuffle(merged.begin(), merged.end(), rng);
  return merged;
}

NoiseTable::NoiseTable(std::span<const WalkPair> pairs, std::size_t num_nodes) {
  if (pairs.empty()) throw ValidationError("noise table needs a non-empty pair list");
  std::vector<std::uint64_t> counts(num_nodes, 0);
  for (const auto& p : pairs) {
    ++counts[p.center];
    ++counts[p.context];
  }
  *this = from_counts(counts);
}

NoiseTable NoiseTable::from_counts(std::span<const std::uint64_t> counts) {
  NoiseTable t;
  t.counts_.assign(counts.begin(), counts.end());
  for (std::size_t u = 0; u < counts.size(); ++u) {
    if (counts[u] == 0) continue;
    t.support_.push_back(static_cast<NodeId>(u));
    t.masses_.push_back(std::pow(static_cast<double>(counts[u]), 0.75));
  }
  if (t.support_.empty()) throw ValidationError("noise table needs at least one occurrence");
  t.total_mass_ = std::accumulate(t.masses_.begin(), t.masses_.end(), 0.0);
  t.alias_ = AliasTable(t.masses_);
  return t;
}

double NoiseTable::probability(NodeId u) const {
  if (u >= counts_.size() || counts_[u] == 0) return 0.0;
  return std::pow(static_cast<double>(counts_[u]), 0.75) / total_mass_;
}

TrainingCorpus build_corpus(const MultiViewNetwork& net, const WalkConfig& cfg, std::ostream* walk_dump) {
  cfg.validate();
  TrainingCorpus corpus;
  corpus.walks_per_view = walk_budget(net, cfg);
  std::vector<PairList> lists;
  for (ViewId v = 0; v < net.num_views(); ++v) {
    if (non_isolated_count(net, v) == 0) {
      lists.emplace_back();
      corpus.noise.emplace_back();
      continue;
    }
    auto walks = generate_walks(net, v, corpus.walks_per_view, cfg);
    if (walk_dump) dump_walks(*walk_dump, net, walks);
    lists.push_back(extract_pairs(walks, cfg.window));
    corpus.noise.emplace_back(lists.back(), net.num_nodes());
  }
  corpus.pairs = merge_and_shuffle(std::move(lists), cfg.seed);
  return corpus;
}

void dump_walks(std::ostream& out, const MultiViewNetwork& net, const WalkSet& walks) {
  for (std::size_t w = 0; w < walks.size(); ++w) {
    auto walk = walks.walk(w);
    for (std::size_t i = 0; i < walk.size(); ++i) out << (i ? " " : "") << net.node_label(walk[i]);
    out << '\n';
  }
}

}  // namespace mvembed
