#include "mvembed/objective.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace mvembed {

namespace {

template <class Real>
std::vector<double> to_double(std::span<const Real> row) {
  return {row.begin(), row.end()};
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void add_scaled(std::vector<double>& y, double alpha, const std::vector<double>& x) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

template <class Real>
void check_pair(const BasicEmbeddingStore<Real>& store, const PairSample& pair) {
  if (pair.view >= store.num_views()) throw UsageError("pair view out of range");
  if (pair.center >= store.num_nodes() || pair.context >= store.num_nodes()) throw UsageError("pair node out of range");
  for (NodeId n : pair.negatives)
    if (n >= store.num_nodes()) throw UsageError("negative node out of range");
}

// Penalty weight on a row's residual: d/dx ||x - mean||^2 = 2 (1 - 1/|P|) (x - mean).
double residual_slope(std::size_t participating) { return 2.0 * (1.0 - 1.0 / static_cast<double>(participating)); }

}  // namespace

const RowGradient* PairGradient::find(Role role, std::size_t slot, NodeId node) const {
  for (const auto& r : rows)
    if (r.role == role && r.slot == slot && r.node == node) return &r;
  return nullptr;
}

template <class Real>
std::vector<double> effective_context(const BasicEmbeddingStore<Real>& store, NodeId n, ViewId v,
                                      const ObjectiveOptions& opt) {
  if (store.variant() == Variant::con) return phi_context(store, n, v, opt.theta, opt.appendix_gradients);
  return to_double(store.context(store.slot(v)).row(n));
}

template <class Real>
double pair_objective(const BasicEmbeddingStore<Real>& store, const PairSample& pair, const ObjectiveOptions& opt) {
  check_pair(store, pair);
  const ViewId v = pair.view;
  auto f = to_double(store.center(store.slot(v)).row(pair.center));
  double value = log_sigmoid(dot(f, effective_context(store, pair.context, v, opt)));
  for (NodeId neg : pair.negatives) value += log_sigmoid(-dot(f, effective_context(store, neg, v, opt)));
  if (store.variant() == Variant::reg && opt.gamma != 0.0) {
    const double k1 = static_cast<double>(pair.negatives.size() + 1);
    double penalty = k1 * regularizer_residual(store, pair.center, v, Role::center).squared_norm;
    penalty += regularizer_residual(store, pair.context, v, Role::context).squared_norm;
    for (NodeId neg : pair.negatives) penalty += regularizer_residual(store, neg, v, Role::context).squared_norm;
    value -= opt.gamma * penalty;
  }
  return value;
}

template <class Real>
PairGradient pair_gradient(const BasicEmbeddingStore<Real>& store, const PairSample& pair, const ObjectiveOptions& opt) {
  check_pair(store, pair);
  const Variant variant = store.variant();
  const ViewId v = pair.view;
  const std::size_t s = store.slot(v);
  const std::size_t d = store.slot_dim();
  const bool regularized = variant == Variant::reg && opt.gamma != 0.0;
  auto f = to_double(store.center(s).row(pair.center));

  using Key = std::tuple<int, std::size_t, NodeId>;
  std::map<Key, std::vector<double>> acc;
  auto row = [&](Role role, std::size_t slot, NodeId node) -> std::vector<double>& {
    auto& g = acc[{static_cast<int>(role), slot, node}];
    if (g.empty()) g.assign(d, 0.0);
    return g;
  };

  std::vector<double> center_grad(d, 0.0);
  auto visit = [&](NodeId target, double label) {
    auto c = effective_context(store, target, v, opt);
    const double g = label - sigmoid(dot(f, c));
    add_scaled(center_grad, g, c);
    if (variant == Variant::con) {
      auto views = store.participating_views(target, v);
      auto mix = context_mixing(opt.theta, views.size(), opt.appendix_gradients);
      for (ViewId w : views) add_scaled(row(Role::context, w, target), g * (w == v ? mix.own : mix.other), f);
    } else {
      add_scaled(row(Role::context, s, target), g, f);
    }
    if (regularized) {
      auto r = regularizer_residual(store, target, v, Role::context);
      auto views = store.participating_views(target, v);
      add_scaled(row(Role::context, v, target), -opt.gamma * residual_slope(views.size()), r.vector);
    }
  };
  visit(pair.context, 1.0);
  for (NodeId neg : pair.negatives) visit(neg, 0.0);

  if (regularized) {
    auto r = regularizer_residual(store, pair.center, v, Role::center);
    auto views = store.participating_views(pair.center, v);
    const double k1 = static_cast<double>(pair.negatives.size() + 1);
    add_scaled(center_grad, -opt.gamma * k1 * residual_slope(views.size()), r.vector);
  }

  PairGradient out;
  out.rows.push_back({Role::center, s, pair.center, std::move(center_grad)});
  for (auto& [key, g] : acc) out.rows.push_back({Role::context, std::get<1>(key), std::get<2>(key), std::move(g)});
  return out;
}

template <class Real>
PairGradient grad_con(const BasicEmbeddingStore<Real>& store, const PairSample& pair, double theta, bool appendix_form) {
  if (store.variant() != Variant::con) throw UsageError("grad_con requires the con variant");
  return pair_gradient(store, pair, ObjectiveOptions{theta, 0.0, appendix_form});
}

template <class Real>
PairGradient grad_reg(const BasicEmbeddingStore<Real>& store, const PairSample& pair, double gamma) {
  if (store.variant() != Variant::reg) throw UsageError("grad_reg requires the reg variant");
  return pair_gradient(store, pair, ObjectiveOptions{0.0, gamma, false});
}

template <class Real>
std::vector<double> softmax_probabilities(const BasicEmbeddingStore<Real>& store, NodeId u, ViewId v,
                                          const ObjectiveOptions& opt) {
  auto f = to_double(store.center(store.slot(v)).row(u));
  std::vector<double> logits(store.num_nodes());
  for (NodeId n = 0; n < store.num_nodes(); ++n) logits[n] = dot(f, effective_context(store, n, v, opt));
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& x : logits) {
    x = std::exp(x - top);
    z += x;
  }
  for (double& x : logits) x /= z;
  return logits;
}

template <class Real>
double full_softmax_loss(const BasicEmbeddingStore<Real>& store, ViewId v, std::span<const WalkPair> pairs,
                         const ObjectiveOptions& opt) {
  double loss = 0.0;
  std::map<NodeId, std::vector<double>> cache;
  for (const auto& p : pairs) {
    if (p.view != v) continue;
    auto it = cache.find(p.center);
    if (it == cache.end()) it = cache.emplace(p.center, softmax_probabilities(store, p.center, v, opt)).first;
    loss -= std::log(it->second[p.context]);
  }
  return loss;
}

template <class Real>
void softmax_descent_step(BasicEmbeddingStore<Real>& store, ViewId v, std::span<const WalkPair> pairs,
                          double step_size) {
  if (store.variant() == Variant::con) throw UsageError("softmax_descent_step does not support con");
  const std::size_t s = store.slot(v);
  const std::size_t d = store.slot_dim();
  const std::size_t n = store.num_nodes();
  std::vector<double> grad_center(n * d, 0.0), grad_context(n * d, 0.0);
  std::map<NodeId, std::vector<double>> cache;
  for (const auto& p : pairs) {
    if (p.view != v) continue;
    auto it = cache.find(p.center);
    if (it == cache.end()) it = cache.emplace(p.center, softmax_probabilities(store, p.center, v)).first;
    const auto& prob = it->second;
    auto f = store.center(s).row(p.center);
    // loss term: -(f . c_n) + log sum exp(f . c_m)
    for (NodeId m = 0; m < n; ++m) {
      const double coef = prob[m] - (m == p.context ? 1.0 : 0.0);
      auto c = store.context(s).row(m);
      for (std::size_t k = 0; k < d; ++k) {
        grad_center[p.center * d + k] += coef * static_cast<double>(c[k]);
        grad_context[m * d + k] += coef * static_cast<double>(f[k]);
      }
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    auto f = store.center(s).row(u);
    auto c = store.context(s).row(u);
    for (std::size_t k = 0; k < d; ++k) {
      f[k] = static_cast<Real>(static_cast<double>(f[k]) - step_size * grad_center[u * d + k]);
      c[k] = static_cast<Real>(static_cast<double>(c[k]) - step_size * grad_context[u * d + k]);
    }
  }
}

#define MVEMBED_INSTANTIATE(Real)                                                                                  \
  template std::vector<double> effective_context(const BasicEmbeddingStore<Real>&, NodeId, ViewId,                 \
                                                 const ObjectiveOptions&);                                         \
  template double pair_objective(const BasicEmbeddingStore<Real>&, const PairSample&, const ObjectiveOptions&);    \
  template PairGradient pair_gradient(const BasicEmbeddingStore<Real>&, const PairSample&, const ObjectiveOptions&); \
  template PairGradient grad_con(const BasicEmbeddingStore<Real>&, const PairSample&, double, bool);               \
  template PairGradient grad_reg(const BasicEmbeddingStore<Real>&, const PairSample&, double);                     \
  template std::vector<double> softmax_probabilities(const BasicEmbeddingStore<Real>&, NodeId, ViewId,             \
                                                     const ObjectiveOptions&);                                     \
  template double full_softmax_loss(const BasicEmbeddingStore<Real>&, ViewId, std::span<const WalkPair>,           \
                                    const ObjectiveOptions&);                                                      \
  template void softmax_descent_step(BasicEmbeddingStore<Real>&, ViewId, std::span<const WalkPair>, double);

MVEMBED_INSTANTIATE(float)
MVEMBED_INSTANTIATE(double)

#undef MVEMBED_INSTANTIATE

}  // namespace mvembed
