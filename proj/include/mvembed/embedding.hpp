#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvembed/common.hpp"
#include "mvembed/graph.hpp"

namespace mvembed {

enum class Variant { con, reg, independent, one_space, view_merging, single_view };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);
// con, reg and independent keep one d(v) = D/|V| block per view.
bool is_per_view(Variant v);

// Dense row-major matrix, one row per node.
template <class Real>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Real(0)) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<Real> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Real> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  Real* data() noexcept { return data_.data(); }
  const Real* data() const noexcept { return data_.data(); }
  const std::vector<Real>& values() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

// Center/context parameters for every variant. Per-view variants hold one block
// per view ("slot"); sharing variants hold a single slot used by all views.
template <class Real>
class BasicEmbeddingStore {
 public:
  BasicEmbeddingStore() = default;
  // Centers ~ U[-0.5/d, 0.5/d] from `seed`, contexts zero.
  BasicEmbeddingStore(const MultiViewNetwork& net, Variant variant, std::size_t dim, std::uint64_t seed);

  Variant variant() const noexcept { return variant_; }
  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_views() const noexcept { return num_views_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t slot_dim() const noexcept { return slot_dim_; }
  std::size_t num_slots() const noexcept { return center_.size(); }
  std::size_t slot(ViewId v) const noexcept { return is_per_view(variant_) ? v : 0; }

  Matrix<Real>& center(std::size_t slot) { return center_[slot]; }
  const Matrix<Real>& center(std::size_t slot) const { return center_[slot]; }
  Matrix<Real>& context(std::size_t slot) { return context_[slot]; }
  const Matrix<Real>& context(std::size_t slot) const { return context_[slot]; }

  // Whether u has at least one edge in view v (as recorded at construction).
  bool active(NodeId u, ViewId v) const { return active_[static_cast<std::size_t>(u) * num_views_ + v] != 0; }
  // Views that take part in u's cross-view mean for a pair drawn from view v:
  // the views where u has edges, plus v itself.
  std::vector<ViewId> participating_views(NodeId u, ViewId v) const;

  bool all_finite() const;

  friend bool operator==(const BasicEmbeddingStore&, const BasicEmbeddingStore&) = default;

 private:
  Variant variant_ = Variant::independent;
  std::size_t num_nodes_ = 0;
  std::size_t num_views_ = 0;
  std::size_t dim_ = 0;
  std::size_t slot_dim_ = 0;
  std::vector<Matrix<Real>> center_;
  std::vector<Matrix<Real>> context_;
  std::vector<std::uint8_t> active_;
};

using EmbeddingStore = BasicEmbeddingStore<float>;

// Coefficients of the con context map: phi = own * g[v] + other * sum_{v' != v} g[v'].
struct ContextMixing {
  double own;
  double other;
};

// theta-blend over `views` participating views. The default form follows from
// phi = (1-theta) g[v] + theta/|V| sum g[v']; `appendix_form` uses the
// alternative (theta + (1-theta)/|V|, theta) coefficients.
ContextMixing context_mixing(double theta, std::size_t views, bool appendix_form = false);

template <class Real>
std::vector<double> phi_context(const BasicEmbeddingStore<Real>& store, NodeId u, ViewId v, double theta,
                                bool appendix_form = false);

enum class Role { center, context };

struct Residual {
  double squared_norm;
  std::vector<double> vector;
};

// R^v_u (or its context analogue): distance of u's view-v row to u's cross-view mean.
template <class Real>
Residual regularizer_residual(const BasicEmbeddingStore<Real>& store, NodeId u, ViewId v, Role role = Role::center);

// Final per-node vectors f_u in R^D with their labels.
struct EmbeddingTable {
  std::vector<std::string> labels;
  std::size_t dim = 0;
  std::vector<double> values;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

// Concatenation of center slots in ascending view order (one slot for sharing variants).
template <class Real>
EmbeddingTable final_embedding(const BasicEmbeddingStore<Real>& store, const MultiViewNetwork& net);

}  // namespace mvembed
