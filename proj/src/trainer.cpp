#include "mvembed/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <random>
#include <thread>
#include <type_traits>

#include "mvembed/simd/kernels.hpp"

namespace mvembed {

void TrainConfig::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0, 1]");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(alpha0 > 0.0) || !(alpha_min > 0.0)) throw ConfigError("step sizes must be positive");
  if (threads < 1) throw ConfigError("thread count must be >= 1");
  if (appendix_gradients && variant != Variant::con) throw ConfigError("appendix gradients apply to con only");
}

std::size_t TrainConfig::resolved_dim(std::size_t views) const {
  if (dim != 0) return dim;
  return is_per_view(variant) ? 128 * views : 128;
}

double step_size(const TrainConfig& cfg, std::size_t t, std::size_t total) {
  const double frac = total == 0 ? 0.0 : static_cast<double>(t) / static_cast<double>(total);
  return std::max(cfg.alpha_min, cfg.alpha0 * (1.0 - frac));
}

namespace {

// Applies the per-pair ascent step in place. All gradients are formed from the
// parameters as they were before the step, then applied.
template <class Real>
class PairUpdater {
 public:
  PairUpdater(BasicEmbeddingStore<Real>& store, const TrainConfig& cfg, std::size_t max_negatives)
      : store_(store),
        k_(simd::active()),
        d_(store.slot_dim()),
        variant_(store.variant()),
        theta_(cfg.theta),
        gamma_(store.variant() == Variant::reg ? cfg.gamma : 0.0),
        appendix_(cfg.appendix_gradients),
        neu1e_(d_),
        center_resid_(d_),
        phi_((max_negatives + 1) * d_),
        resid_((max_negatives + 1) * d_),
        g_(max_negatives + 1),
        dots_(max_negatives + 1) {}

  // Returns false when a score is not finite; nothing is written in that case.
  bool step(NodeId u, NodeId n, ViewId v, std::span<const NodeId> negatives, double alpha) {
    const std::size_t slot = store_.slot(v);
    Real* f = store_.center(slot).row(u).data();
    const std::size_t targets = negatives.size() + 1;
    auto target = [&](std::size_t i) { return i == 0 ? n : negatives[i - 1]; };

    std::fill(neu1e_.begin(), neu1e_.end(), Real(0));
    for (std::size_t i = 0; i < targets; ++i) {
      const NodeId t = target(i);
      const Real* c = context_for(t, v, slot, phi_.data() + i * d_);
      const Real x = dot(f, c);
      if (!std::isfinite(x)) return false;
      dots_[i] = static_cast<double>(x);
      g_[i] = (i == 0 ? 1.0 : 0.0) - sigmoid(static_cast<double>(x));
      axpy(static_cast<Real>(g_[i]), c, neu1e_.data());
      if (gamma_ != 0.0) residual(t, v, resid_.data() + i * d_, Role::context);
    }

    for (std::size_t i = 0; i < targets; ++i) {
      const NodeId t = target(i);
      const double step = alpha * g_[i];
      if (variant_ == Variant::con) {
        const auto mix = mixing(t, v);
        for (ViewId w = 0; w < store_.num_views(); ++w) {
          if (w != v && !store_.active(t, w)) continue;
          const double coef = w == v ? mix.own : mix.other;
          if (coef != 0.0) axpy(static_cast<Real>(step * coef), f, store_.context(w).row(t).data());
        }
      } else {
        Real* c = store_.context(slot).row(t).data();
        axpy(static_cast<Real>(step), f, c);
        if (gamma_ != 0.0) {
          const double slope = 2.0 * (1.0 - 1.0 / static_cast<double>(participating(t, v)));
          axpy(static_cast<Real>(-alpha * gamma_ * slope), resid_.data() + i * d_, c);
        }
      }
    }

    if (gamma_ != 0.0) {
      residual(u, v, center_resid_.data(), Role::center);
      const double slope = 2.0 * (1.0 - 1.0 / static_cast<double>(participating(u, v)));
      axpy(static_cast<Real>(-gamma_ * static_cast<double>(targets) * slope), center_resid_.data(), neu1e_.data());
    }
    axpy(static_cast<Real>(alpha), neu1e_.data(), f);
    return true;
  }

  // Sum of the likelihood terms of the last step.
  double last_likelihood(std::size_t targets) const {
    double value = log_sigmoid(dots_[0]);
    for (std::size_t i = 1; i < targets; ++i) value += log_sigmoid(-dots_[i]);
    return value;
  }

 private:
  Real dot(const Real* a, const Real* b) const {
    if constexpr (std::is_same_v<Real, float>) {
      return k_.dot_f32(a, b, d_);
    } else {
      return k_.dot_f64(a, b, d_);
    }
  }
  void axpy(Real alpha, const Real* x, Real* y) const {
    if constexpr (std::is_same_v<Real, float>) {
      k_.axpy_f32(alpha, x, y, d_);
    } else {
      k_.axpy_f64(alpha, x, y, d_);
    }
  }
  void scale(Real alpha, const Real* x, Real* y) const {
    if constexpr (std::is_same_v<Real, float>) {
      k_.scale_f32(alpha, x, y, d_);
    } else {
      k_.scale_f64(alpha, x, y, d_);
    }
  }

  std::size_t participating(NodeId t, ViewId v) const {
    std::size_t count = 0;
    for (ViewId w = 0; w < store_.num_views(); ++w) count += (w == v || store_.active(t, w)) ? 1 : 0;
    return count;
  }

  ContextMixing mixing(NodeId t, ViewId v) const { return context_mixing(theta_, participating(t, v), appendix_); }

  // Context vector scored against f: the stored row, or phi written into `scratch` for con.
  const Real* context_for(NodeId t, ViewId v, std::size_t slot, Real* scratch) const {
    if (variant_ != Variant::con) return store_.context(slot).row(t).data();
    const auto mix = mixing(t, v);
    scale(static_cast<Real>(mix.own), store_.context(v).row(t).data(), scratch);
    if (mix.other != 0.0) {
      for (ViewId w = 0; w < store_.num_views(); ++w) {
        if (w != v && store_.active(t, w)) axpy(static_cast<Real>(mix.other), store_.context(w).row(t).data(), scratch);
      }
    }
    return scratch;
  }

  // out = row_v(t) - mean over participating views of row_w(t).
  void residual(NodeId t, ViewId v, Real* out, Role role) const {
    auto rows = [&](ViewId w) {
      return role == Role::center ? store_.center(w).row(t).data() : store_.context(w).row(t).data();
    };
    const Real inv = static_cast<Real>(1.0 / static_cast<double>(participating(t, v)));
    std::fill(out, out + d_, Real(0));
    for (ViewId w = 0; w < store_.num_views(); ++w) {
      if (w == v || store_.active(t, w)) axpy(-inv, rows(w), out);
    }
    axpy(Real(1), rows(v), out);
  }

  BasicEmbeddingStore<Real>& store_;
  const simd::KernelTable& k_;
  std::size_t d_;
  Variant variant_;
  double theta_;
  double gamma_;
  bool appendix_;
  std::vector<Real> neu1e_;
  std::vector<Real> center_resid_;
  std::vector<Real> phi_;
  std::vector<Real> resid_;
  std::vector<double> g_;
  std::vector<double> dots_;
};

template <class Rng>
std::size_t draw_negatives(const NoiseTable& table, NodeId positive, std::uint32_t k, Rng& rng,
                           std::vector<NodeId>& out) {
  out.clear();
  for (std::uint32_t i = 0; i < k; ++i) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      NodeId cand = table.sample(rng);
      if (cand != positive) {
        out.push_back(cand);
        break;
      }
    }
  }
  return out.size();
}

}  // namespace

template <class Real>
void apply_pair_update(BasicEmbeddingStore<Real>& store, const PairSample& pair, double alpha, const TrainConfig& cfg) {
  PairUpdater<Real> updater(store, cfg, pair.negatives.size());
  if (!updater.step(pair.center, pair.context, pair.view, pair.negatives, alpha)) {
    throw TrainingError(0, "non-finite score");
  }
}

template <class Real>
TrainStats train(BasicEmbeddingStore<Real>& store, std::span<const WalkPair> pairs, std::span<const NoiseTable> noise,
                 const TrainConfig& cfg) {
  cfg.validate();
  if (pairs.empty()) throw ValidationError("training pair list is empty");
  if (noise.size() < store.num_views()) throw UsageError("one noise table per view is required");
  if (cfg.variant != store.variant()) throw UsageError("store variant does not match the training config");

  const std::size_t total = pairs.size() * cfg.epochs;
  const unsigned threads = std::max(1U, std::min<unsigned>(cfg.threads, static_cast<unsigned>(pairs.size())));
  const auto start = std::chrono::steady_clock::now();

  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::atomic<std::size_t> processed{0};
  TrainStats stats;
  double objective_sum = 0.0;
  std::size_t objective_count = 0;

  auto worker = [&](unsigned tid) {
    try {
      const std::size_t lo = pairs.size() * tid / threads;
      const std::size_t hi = pairs.size() * (tid + 1) / threads;
      PairUpdater<Real> updater(store, cfg, cfg.negatives);
      std::vector<std::mt19937_64> rngs;
      for (ViewId v = 0; v < store.num_views(); ++v) rngs.emplace_back(derive_seed(cfg.seed, 0x4e4547ULL + tid, v));
      std::vector<NodeId> negs;
      negs.reserve(cfg.negatives);
      double alpha = cfg.alpha0;
      for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = lo; i < hi; ++i) {
          if (stop.load(std::memory_order_relaxed)) return;
          const std::size_t t = epoch * pairs.size() + (i - lo) * threads;
          alpha = step_size(cfg, t, total);
          const WalkPair& p = pairs[i];
          draw_negatives(noise[p.view], p.context, cfg.negatives, rngs[p.view], negs);
          if (!updater.step(p.center, p.context, p.view, negs, alpha)) {
            throw TrainingError(epoch * pairs.size() + i, "non-finite score for pair (" + std::to_string(p.center) +
                                                              ", " + std::to_string(p.context) + ") in view " +
                                                              std::to_string(p.view));
          }
          if (tid == 0 && (i & 63) == 0) {
            objective_sum += updater.last_likelihood(negs.size() + 1);
            ++objective_count;
          }
          if (tid == 0 && cfg.verbose && ((i - lo) & ((1U << 21) - 1)) == 0 && i != lo) {
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const double done = static_cast<double>(epoch * pairs.size() + (i - lo) * threads);
            std::fprintf(stderr, "\r[train] %5.1f%%  %.3g pairs/s  alpha %.3g  objective %.4f   ",
                         100.0 * done / static_cast<double>(total), done / std::max(secs, 1e-9), alpha,
                         objective_sum / static_cast<double>(std::max<std::size_t>(objective_count, 1)));
          }
        }
      }
      processed.fetch_add((hi - lo) * cfg.epochs);
      if (tid == 0) stats.final_alpha = alpha;
    } catch (...) {
      if (!stop.exchange(true)) failure = std::current_exception();
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (cfg.verbose) std::fprintf(stderr, "\n");
  if (failure) std::rethrow_exception(failure);
  if (!store.all_finite()) throw TrainingError(total, "parameters are not finite after training");

  stats.pairs_processed = processed.load();
  stats.objective_estimate = objective_sum / static_cast<double>(std::max<std::size_t>(objective_count, 1));
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

template TrainStats train(BasicEmbeddingStore<float>&, std::span<const WalkPair>, std::span<const NoiseTable>,
                          const TrainConfig&);
template TrainStats train(BasicEmbeddingStore<double>&, std::span<const WalkPair>, std::span<const NoiseTable>,
                          const TrainConfig&);
template void apply_pair_update(BasicEmbeddingStore<float>&, const PairSample&, double, const TrainConfig&);
template void apply_pair_update(BasicEmbeddingStore<double>&, const PairSample&, double, const TrainConfig&);

}  // namespace mvembed
