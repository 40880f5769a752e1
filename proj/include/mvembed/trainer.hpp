#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mvembed/embedding.hpp"
#include "mvembed/objective.hpp"
#include "mvembed/walks.hpp"

namespace mvembed {

struct TrainConfig {
  Variant variant = Variant::independent;
  double theta = 0.0;
  double gamma = 0.0;
  std::size_t dim = 0;  // 0 selects the variant default (128 * |V| per-view, 128 otherwise)
  std::uint32_t negatives = 5;
  std::uint32_t epochs = 1;
  double alpha0 = 0.025;
  double alpha_min = 0.025 * 1e-4;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool appendix_gradients = false;
  bool verbose = false;

  void validate() const;
  ObjectiveOptions objective() const { return {theta, gamma, appendix_gradients}; }
  // Dimension after applying the variant default for a network with `views` views.
  std::size_t resolved_dim(std::size_t views) const;
};

// alpha(t) = max(alpha_min, alpha0 * (1 - t / T)).
double step_size(const TrainConfig& cfg, std::size_t t, std::size_t total);

struct TrainStats {
  std::size_t pairs_processed = 0;
  double final_alpha = 0.0;
  double objective_estimate = 0.0;  // mean per-pair likelihood term on sampled pairs
  double seconds = 0.0;
};

// Hogwild ASGD over W for `cfg.epochs` passes; threads take contiguous slices of W.
// With threads == 1 the result is a deterministic function of the inputs.
template <class Real>
TrainStats train(BasicEmbeddingStore<Real>& store, std::span<const WalkPair> pairs, std::span<const NoiseTable> noise,
                 const TrainConfig& cfg);

// One ascent step for a single pair with explicit negatives (no sampling).
// This is the exact update train() applies per pair.
template <class Real>
void apply_pair_update(BasicEmbeddingStore<Real>& store, const PairSample& pair, double alpha, const TrainConfig& cfg);

}  // namespace mvembed
