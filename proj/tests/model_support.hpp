#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "mvembed/embedding.hpp"

// Independent restatement of the per-pair objective for oracle checks.
namespace oracle {

using namespace mvembed;

struct Params {
  double theta = 0.0;
  double gamma = 0.0;
  bool appendix = false;
};

inline double log_sig(double x) { return -std::log1p(std::exp(-x)); }

inline std::vector<ViewId> views_for(const BasicEmbeddingStore<double>& s, NodeId t, ViewId v) {
  std::vector<ViewId> out;
  for (ViewId w = 0; w < s.num_views(); ++w)
    if (w == v || s.active(t, w)) out.push_back(w);
  return out;
}

inline std::vector<double> context_vector(const BasicEmbeddingStore<double>& s, NodeId t, ViewId v, const Params& p) {
  const std::size_t d = s.slot_dim();
  std::vector<double> out(d, 0.0);
  if (s.variant() != Variant::con) {
    auto row = s.context(s.slot(v)).row(t);
    return {row.begin(), row.end()};
  }
  auto views = views_for(s, t, v);
  const double n = static_cast<double>(views.size());
  for (ViewId w : views) {
    double coef;
    if (p.appendix) coef = w == v ? p.theta + (1.0 - p.theta) / n : p.theta;
    else coef = (w == v ? 1.0 - p.theta : 0.0) + p.theta / n;
    auto row = s.context(w).row(t);
    for (std::size_t k = 0; k < d; ++k) out[k] += coef * row[k];
  }
  return out;
}

inline double spread(const BasicEmbeddingStore<double>& s, NodeId t, ViewId v, bool center) {
  auto views = views_for(s, t, v);
  const std::size_t d = s.slot_dim();
  double total = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (ViewId w : views) mean += center ? s.center(w).row(t)[k] : s.context(w).row(t)[k];
    mean /= static_cast<double>(views.size());
    const double own = center ? s.center(v).row(t)[k] : s.context(v).row(t)[k];
    total += (own - mean) * (own - mean);
  }
  return total;
}

inline double objective(const BasicEmbeddingStore<double>& s, NodeId u, NodeId n, const std::vector<NodeId>& negs,
                        ViewId v, const Params& p) {
  auto f = s.center(s.slot(v)).row(u);
  auto score = [&](NodeId t) {
    auto c = context_vector(s, t, v, p);
    double x = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) x += f[k] * c[k];
    return x;
  };
  double value = log_sig(score(n));
  for (NodeId m : negs) value += log_sig(-score(m));
  if (s.variant() == Variant::reg) {
    double pen = static_cast<double>(negs.size() + 1) * spread(s, u, v, true) + spread(s, n, v, false);
    for (NodeId m : negs) pen += spread(s, m, v, false);
    value -= p.gamma * pen;
  }
  return value;
}

}  // namespace oracle

namespace fixtures {

// Three views; node activity differs per view so participating sets vary.
inline mvembed::MultiViewNetwork three_views() {
  std::istringstream in(
      "x\t0\t1\nx\t1\t2\nx\t2\t3\nx\t3\t4\nx\t4\t5\nx\t5\t0\n"
      "y\t0\t2\ny\t2\t4\ny\t4\t6\ny\t6\t7\n"
      "z\t1\t3\nz\t3\t7\nz\t7\t5\nz\t0\t7\n");
  return mvembed::read_network(in);
}

inline mvembed::MultiViewNetwork one_view() {
  std::istringstream in("m\t0\t1\nm\t1\t2\nm\t2\t3\nm\t3\t0\nm\t0\t2\n");
  return mvembed::read_network(in);
}

inline void randomize(mvembed::BasicEmbeddingStore<double>& s, std::mt19937_64& rng, double scale = 0.5) {
  std::normal_distribution<double> g(0.0, scale);
  for (std::size_t slot = 0; slot < s.num_slots(); ++slot) {
    for (std::size_t u = 0; u < s.num_nodes(); ++u) {
      for (double& x : s.center(slot).row(u)) x = g(rng);
      for (double& x : s.context(slot).row(u)) x = g(rng);
    }
  }
}

}  // namespace fixtures

#include "mvembed/objective.hpp"

namespace oracle {

// Draws a pair whose nodes are all active in the pair's view, as walks and noise tables guarantee.
struct RandomPair {
  NodeId u, n;
  ViewId v;
  std::vector<NodeId> negs;
};

inline RandomPair random_pair(const MultiViewNetwork& net, std::size_t k, std::mt19937_64& rng) {
  std::uniform_int_distribution<ViewId> pick_view(0, static_cast<ViewId>(net.num_views() - 1));
  RandomPair p;
  p.v = pick_view(rng);
  std::vector<NodeId> active;
  for (NodeId u = 0; u < net.num_nodes(); ++u)
    if (net.has_edges(u, p.v)) active.push_back(u);
  std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
  p.u = active[pick(rng)];
  p.n = active[pick(rng)];
  while (p.n == p.u) p.n = active[pick(rng)];
  for (std::size_t i = 0; i < k; ++i) p.negs.push_back(active[pick(rng)]);
  return p;
}

// Largest relative error between pair_gradient rows and central differences of the
// oracle objective, plus a check that untouched updatable rows have zero gradient.
struct FdResult {
  double max_rel_error = 0.0;
  double max_untouched = 0.0;
};

inline FdResult finite_difference_check(BasicEmbeddingStore<double>& s, const RandomPair& rp, const Params& p) {
  const double h = 1e-5;
  PairSample sample{rp.u, rp.n, rp.v, rp.negs};
  auto grad = pair_gradient(s, sample, ObjectiveOptions{p.theta, p.gamma, p.appendix});
  FdResult result;
  auto fd_row = [&](std::span<double> row) {
    std::vector<double> g(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double keep = row[k];
      row[k] = keep + h;
      const double up = objective(s, rp.u, rp.n, rp.negs, rp.v, p);
      row[k] = keep - h;
      const double down = objective(s, rp.u, rp.n, rp.negs, rp.v, p);
      row[k] = keep;
      g[k] = (up - down) / (2.0 * h);
    }
    return g;
  };
  for (const auto& r : grad.rows) {
    auto row = r.role == Role::center ? s.center(r.slot).row(r.node) : s.context(r.slot).row(r.node);
    auto fd = fd_row(row);
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < fd.size(); ++k) {
      diff += (fd[k] - r.grad[k]) * (fd[k] - r.grad[k]);
      norm += fd[k] * fd[k];
    }
    result.max_rel_error = std::max(result.max_rel_error, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-6));
  }
  // Rows the pair's update may touch: view-v rows (all variants) and, for con, other views' context rows.
  const std::size_t slot = s.slot(rp.v);
  std::vector<NodeId> nodes{rp.u, rp.n};
  nodes.insert(nodes.end(), rp.negs.begin(), rp.negs.end());
  for (NodeId t : nodes)
    for (int role = 0; role < 2; ++role) {
      const Role rl = role == 0 ? Role::center : Role::context;
      for (std::size_t sl = 0; sl < s.num_slots(); ++sl) {
        if (s.variant() == Variant::reg && sl != slot) continue;
        if (grad.find(rl, sl, t)) continue;
        auto row = rl == Role::center ? s.center(sl).row(t) : s.context(sl).row(t);
        for (double g : fd_row(row)) result.max_untouched = std::max(result.max_untouched, std::abs(g));
      }
    }
  return result;
}

}  // namespace oracle
