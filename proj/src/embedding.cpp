#include "mvembed/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mvembed {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::con:
      return "con";
    case Variant::reg:
      return "reg";
    case Variant::independent:
      return "independent";
    case Variant::one_space:
      return "one-space";
    case Variant::view_merging:
      return "view-merging";
    case Variant::single_view:
      return "single-view";
  }
  return "unknown";
}

Variant parse_variant(std::string_view text) {
  for (Variant v : {Variant::con, Variant::reg, Variant::independent, Variant::one_space, Variant::view_merging,
                    Variant::single_view}) {
    if (text == to_string(v)) return v;
  }
  throw UsageError("unknown variant '" + std::string(text) + "'");
}

bool is_per_view(Variant v) { return v == Variant::con || v == Variant::reg || v == Variant::independent; }

template <class Real>
BasicEmbeddingStore<Real>::BasicEmbeddingStore(const MultiViewNetwork& net, Variant variant, std::size_t dim,
                                               std::uint64_t seed)
    : variant_(variant), num_nodes_(net.num_nodes()), num_views_(net.num_views()), dim_(dim) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  if (num_views_ == 0) throw ConfigError("network has no views");
  if ((variant == Variant::view_merging || variant == Variant::single_view) && num_views_ != 1) {
    throw ConfigError(std::string(to_string(variant)) + " trains on a single-view network");
  }
  std::size_t slots = 1;
  if (is_per_view(variant)) {
    if (dim % num_views_ != 0) {
      throw ConfigError("dimension " + std::to_string(dim) + " is not divisible by the " +
                        std::to_string(num_views_) + " views");
    }
    slots = num_views_;
  }
  slot_dim_ = dim / slots;

  const double half_range = 0.5 / static_cast<double>(slot_dim_);
  for (std::size_t s = 0; s < slots; ++s) {
    Matrix<Real> c(num_nodes_, slot_dim_);
    std::mt19937_64 rng(derive_seed(seed, 0x1417, s));
    std::uniform_real_distribution<double> init(-half_range, half_range);
    Real* p = c.data();
    for (std::size_t i = 0; i < num_nodes_ * slot_dim_; ++i) p[i] = static_cast<Real>(init(rng));
    center_.push_back(std::move(c));
    context_.emplace_back(num_nodes_, slot_dim_);
  }

  active_.assign(num_nodes_ * num_views_, 0);
  for (NodeId u = 0; u < num_nodes_; ++u)
    for (ViewId v = 0; v < num_views_; ++v) active_[static_cast<std::size_t>(u) * num_views_ + v] = net.has_edges(u, v);
}

template <class Real>
std::vector<ViewId> BasicEmbeddingStore<Real>::participating_views(NodeId u, ViewId v) const {
  std::vector<ViewId> views;
  for (ViewId w = 0; w < num_views_; ++w)
    if (w == v || active(u, w)) views.push_back(w);
  return views;
}

template <class Real>
bool BasicEmbeddingStore<Real>::all_finite() const {
  auto finite = [](const Matrix<Real>& m) {
    return std::all_of(m.values().begin(), m.values().end(), [](Real x) { return std::isfinite(x); });
  };
  return std::all_of(center_.begin(), center_.end(), finite) && std::all_of(context_.begin(), context_.end(), finite);
}

ContextMixing context_mixing(double theta, std::size_t views, bool appendix_form) {
  const double n = static_cast<double>(views);
  if (appendix_form) return {theta + (1.0 - theta) / n, theta};
  return {(1.0 - theta) + theta / n, theta / n};
}

template <class Real>
std::vector<double> phi_context(const BasicEmbeddingStore<Real>& store, NodeId u, ViewId v, double theta,
                                bool appendix_form) {
  if (store.variant() != Variant::con) throw UsageError("phi_context requires the con variant");
  if (theta < 0.0 || theta > 1.0) throw ConfigError("theta must lie in [0, 1]");
  auto views = store.participating_views(u, v);
  auto mix = context_mixing(theta, views.size(), appendix_form);
  std::vector<double> out(store.slot_dim(), 0.0);
  for (ViewId w : views) {
    const double coef = w == v ? mix.own : mix.other;
    auto row = store.context(w).row(u);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += coef * static_cast<double>(row[k]);
  }
  return out;
}

template <class Real>
Residual regularizer_residual(const BasicEmbeddingStore<Real>& store, NodeId u, ViewId v, Role role) {
  if (store.variant() != Variant::reg) throw UsageError("regularizer_residual requires the reg variant");
  auto views = store.participating_views(u, v);
  const std::size_t d = store.slot_dim();
  auto row_of = [&](ViewId w) { return role == Role::center ? store.center(w).row(u) : store.context(w).row(u); };
  std::vector<double> mean(d, 0.0);
  for (ViewId w : views) {
    auto row = row_of(w);
    for (std::size_t k = 0; k < d; ++k) mean[k] += static_cast<double>(row[k]);
  }
  const double inv = 1.0 / static_cast<double>(views.size());
  Residual r{0.0, std::vector<double>(d)};
  auto own = row_of(v);
  for (std::size_t k = 0; k < d; ++k) {
    r.vector[k] = static_cast<double>(own[k]) - mean[k] * inv;
    r.squared_norm += r.vector[k] * r.vector[k];
  }
  return r;
}

template <class Real>
EmbeddingTable final_embedding(const BasicEmbeddingStore<Real>& store, const MultiViewNetwork& net) {
  EmbeddingTable table;
  table.labels = net.nodes().labels();
  table.dim = store.dim();
  table.values.resize(store.num_nodes() * store.dim());
  for (std::size_t u = 0; u < store.num_nodes(); ++u) {
    auto out = table.row(u);
    std::size_t offset = 0;
    for (std::size_t s = 0; s < store.num_slots(); ++s) {
      auto row = store.center(s).row(u);
      std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
      offset += row.size();
    }
  }
  return table;
}

template class BasicEmbeddingStore<float>;
template class BasicEmbeddingStore<double>;
template std::vector<double> phi_context(const BasicEmbeddingStore<float>&, NodeId, ViewId, double, bool);
template std::vector<double> phi_context(const BasicEmbeddingStore<double>&, NodeId, ViewId, double, bool);
template Residual regularizer_residual(const BasicEmbeddingStore<float>&, NodeId, ViewId, Role);
template Residual regularizer_residual(const BasicEmbeddingStore<double>&, NodeId, ViewId, Role);
template EmbeddingTable final_embedding(const BasicEmbeddingStore<float>&, const MultiViewNetwork&);
template EmbeddingTable final_embedding(const BasicEmbeddingStore<double>&, const MultiViewNetwork&);

}  // namespace mvembed
