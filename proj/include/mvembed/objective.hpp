#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "mvembed/embedding.hpp"
#include "mvembed/walks.hpp"

namespace mvembed {

// 1 / (1 + exp(-x)) without overflow for large |x|.
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)), finite for every finite x.
inline double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// One walk pair (center, context) from `view` with its drawn negatives.
struct PairSample {
  NodeId center;
  NodeId context;
  ViewId view;
  std::span<const NodeId> negatives;
};

struct ObjectiveOptions {
  double theta = 0.0;  // con
  double gamma = 0.0;  // reg
  bool appendix_gradients = false;
};

// Ascent direction for one parameter row.
struct RowGradient {
  Role role;
  std::size_t slot;
  NodeId node;
  std::vector<double> grad;
};

// Rows touched by one pair; each (role, slot, node) appears once.
struct PairGradient {
  std::vector<RowGradient> rows;

  const RowGradient* find(Role role, std::size_t slot, NodeId node) const;
};

// Per-pair objective that the trainer ascends, evaluated in double precision:
//  - sharing/independent variants: log s(f.c_n) + sum_i log s(-f.c_{n'_i})
//  - con: same with c replaced by the theta-blended context map
//  - reg: likelihood minus gamma * [(K+1) R_u + R~_n + sum_i R~_{n'_i}] (view-v residuals)
template <class Real>
double pair_objective(const BasicEmbeddingStore<Real>& store, const PairSample& pair, const ObjectiveOptions& opt);

// Analytic gradient of pair_objective with respect to the rows the trainer updates.
// For reg only the view-v rows are differentiated (other views' rows enter the
// cross-view means but are not updated by this pair).
template <class Real>
PairGradient pair_gradient(const BasicEmbeddingStore<Real>& store, const PairSample& pair, const ObjectiveOptions& opt);

template <class Real>
PairGradient grad_con(const BasicEmbeddingStore<Real>& store, const PairSample& pair, double theta,
                      bool appendix_form = false);

template <class Real>
PairGradient grad_reg(const BasicEmbeddingStore<Real>& store, const PairSample& pair, double gamma);

// Context row that the center of a view-v pair scores against: the own slot row,
// or the theta-blended map for con.
template <class Real>
std::vector<double> effective_context(const BasicEmbeddingStore<Real>& store, NodeId n, ViewId v,
                                      const ObjectiveOptions& opt);

// p(. | u) over all nodes for view v: softmax of f_u . c_n'. Oracle use only.
template <class Real>
std::vector<double> softmax_probabilities(const BasicEmbeddingStore<Real>& store, NodeId u, ViewId v,
                                          const ObjectiveOptions& opt = {});

// Exact intra-view loss -sum_{(u,n) in pairs, view v} log p(n|u). O(|pairs| |U| d).
template <class Real>
double full_softmax_loss(const BasicEmbeddingStore<Real>& store, ViewId v, std::span<const WalkPair> pairs,
                         const ObjectiveOptions& opt = {});

// One full-batch gradient-descent step on full_softmax_loss for the slot of view v
// (sharing/independent/reg layouts; con is not supported here).
template <class Real>
void softmax_descent_step(BasicEmbeddingStore<Real>& store, ViewId v, std::span<const WalkPair> pairs,
                          double step_size);

}  // namespace mvembed
