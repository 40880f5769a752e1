#include "mvembed/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mvembed/common.hpp"
#include "mvembed/objective.hpp"
#include "mvembed/simd/kernels.hpp"

namespace mvembed {

void FeatureMatrix::append(std::span<const double> r) {
  if (rows == 0 && cols == 0) cols = r.size();
  if (r.size() != cols) throw UsageError("feature row has the wrong dimension");
  values.insert(values.end(), r.begin(), r.end());
  ++rows;
}

namespace {

using Eval = std::function<double(std::span<const double>, std::span<double>)>;

double norm2(std::span<const double> v) { return std::sqrt(simd::dot(v.data(), v.data(), v.size())); }

struct Solution {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
};

// Limited-memory BFGS (10 correction pairs) with Armijo backtracking from the unit step.
Solution minimize(const Eval& eval, std::vector<double> x, const LogregOptions& opt) {
  constexpr std::size_t kMemory = 10;
  const std::size_t n = x.size();
  std::vector<double> g(n), dir(n), xn(n), gn(n);
  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;
  double fx = eval(x, g);
  std::size_t it = 0;
  for (; it < opt.max_iterations && norm2(g) > opt.tolerance; ++it) {
    // Two-loop recursion: dir = -H g.
    for (std::size_t k = 0; k < n; ++k) dir[k] = -g[k];
    std::vector<double> alpha(s_hist.size());
    for (std::size_t j = s_hist.size(); j-- > 0;) {
      alpha[j] = rho_hist[j] * simd::dot(s_hist[j].data(), dir.data(), n);
      simd::axpy(-alpha[j], y_hist[j].data(), dir.data(), n);
    }
    if (!s_hist.empty()) {
      const auto& s = s_hist.back();
      const auto& y = y_hist.back();
      const double gamma = simd::dot(s.data(), y.data(), n) / simd::dot(y.data(), y.data(), n);
      simd::scale(gamma, dir.data(), dir.data(), n);
    }
    for (std::size_t j = 0; j < s_hist.size(); ++j) {
      const double beta = rho_hist[j] * simd::dot(y_hist[j].data(), dir.data(), n);
      simd::axpy(alpha[j] - beta, s_hist[j].data(), dir.data(), n);
    }
    double slope = simd::dot(g.data(), dir.data(), n);
    if (!(slope < 0.0)) {
      // Not a descent direction; fall back to steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t k = 0; k < n; ++k) dir[k] = -g[k];
      slope = -simd::dot(g.data(), g.data(), n);
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / norm2(g)) : 1.0;
    double fn = 0.0;
    for (int tries = 0;; ++tries) {
      for (std::size_t k = 0; k < n; ++k) xn[k] = x[k] + step * dir[k];
      fn = eval(xn, gn);
      if (fn <= fx + 1e-4 * step * slope) break;
      if (tries == 60) return {std::move(x), fx, norm2(g), it};
      step *= 0.5;
    }
    std::vector<double> s(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = xn[k] - x[k];
      y[k] = gn[k] - g[k];
    }
    const double sy = simd::dot(s.data(), y.data(), n);
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      if (s_hist.size() == kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    x.swap(xn);
    g.swap(gn);
    fx = fn;
  }
  return {std::move(x), fx, norm2(g), it};
}

Eval binary_eval(const FeatureMatrix& x, std::vector<double> target, double l2) {
  return [&x, target = std::move(target), l2](std::span<const double> p, std::span<double> g) {
    const std::size_t d = x.cols;
    const double inv_n = 1.0 / static_cast<double>(x.rows);
    std::fill(g.begin(), g.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double* xi = x.values.data() + i * d;
      const double z = simd::dot(p.data(), xi, d) + p[d];
      const double y = target[i];
      loss -= y * log_sigmoid(z) + (1.0 - y) * log_sigmoid(-z);
      const double r = (sigmoid(z) - y) * inv_n;
      simd::axpy(r, xi, g.data(), d);
      g[d] += r;
    }
    double reg = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      reg += p[k] * p[k];
      g[k] += l2 * inv_n * p[k];
    }
    return (loss + 0.5 * l2 * reg) * inv_n;
  };
}

Eval softmax_eval(const FeatureMatrix& x, std::span<const int> labels, std::size_t classes, double l2) {
  return [&x, labels, classes, l2](std::span<const double> p, std::span<double> g) {
    const std::size_t d = x.cols;
    const std::size_t stride = d + 1;
    const double inv_n = 1.0 / static_cast<double>(x.rows);
    std::fill(g.begin(), g.end(), 0.0);
    std::vector<double> z(classes);
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double* xi = x.values.data() + i * d;
      double top = -INFINITY;
      for (std::size_t c = 0; c < classes; ++c) {
        z[c] = simd::dot(p.data() + c * stride, xi, d) + p[c * stride + d];
        top = std::max(top, z[c]);
      }
      double sum = 0.0;
      for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z[c] - top);
      const double lse = top + std::log(sum);
      loss += lse - z[static_cast<std::size_t>(labels[i])];
      for (std::size_t c = 0; c < classes; ++c) {
        const double r = (std::exp(z[c] - lse) - (static_cast<int>(c) == labels[i] ? 1.0 : 0.0)) * inv_n;
        simd::axpy(r, xi, g.data() + c * stride, d);
        g[c * stride + d] += r;
      }
    }
    double reg = 0.0;
    for (std::size_t c = 0; c < classes; ++c)
      for (std::size_t k = 0; k < d; ++k) {
        const double w = p[c * stride + k];
        reg += w * w;
        g[c * stride + k] += l2 * inv_n * w;
      }
    return (loss + 0.5 * l2 * reg) * inv_n;
  };
}

std::vector<double> indicator(std::span<const int> labels, int positive) {
  std::vector<double> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == positive ? 1.0 : 0.0;
  return y;
}

void check_inputs(const FeatureMatrix& x, std::span<const int> labels, std::size_t classes, LogregMode mode,
                  std::span<const double> params) {
  if (labels.size() != x.rows) throw UsageError("label count does not match feature rows");
  if (x.rows == 0) throw UsageError("no training examples");
  if (classes < 2) throw UsageError("at least two classes are required");
  if (mode == LogregMode::binary && classes != 2) throw UsageError("binary mode needs exactly two classes");
  for (int l : labels)
    if (l < 0 || static_cast<std::size_t>(l) >= classes) throw UsageError("label out of range");
  const std::size_t blocks = mode == LogregMode::binary ? 1 : classes;
  if (!params.empty() && params.size() != blocks * (x.cols + 1)) throw UsageError("parameter vector has the wrong size");
}

}  // namespace

LogisticModel train_logreg(const FeatureMatrix& x, std::span<const int> labels, std::size_t classes, double l2,
                           LogregMode mode, const LogregOptions& options, std::span<const double> init) {
  check_inputs(x, labels, classes, mode, init);
  if (!(l2 >= 0.0)) throw UsageError("l2 coefficient must be non-negative");
  if (std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels[0]; }))
    throw ValidationError("training labels contain a single class");

  LogisticModel model;
  model.mode = mode;
  model.classes = classes;
  model.dim = x.cols;
  model.l2 = l2;
  const std::size_t stride = x.cols + 1;
  model.params.assign(model.blocks() * stride, 0.0);
  if (!init.empty()) std::copy(init.begin(), init.end(), model.params.begin());

  if (mode == LogregMode::softmax) {
    auto sol = minimize(softmax_eval(x, labels, classes, l2), model.params, options);
    model.params = std::move(sol.x);
    model.iterations = sol.iterations;
    model.gradient_norm = sol.gradient_norm;
    model.objective = sol.value;
    return model;
  }
  double grad2 = 0.0;
  for (std::size_t b = 0; b < model.blocks(); ++b) {
    const int positive = mode == LogregMode::binary ? 1 : static_cast<int>(b);
    std::vector<double> start(model.params.begin() + b * stride, model.params.begin() + (b + 1) * stride);
    auto sol = minimize(binary_eval(x, indicator(labels, positive), l2), std::move(start), options);
    std::copy(sol.x.begin(), sol.x.end(), model.params.begin() + b * stride);
    model.iterations = std::max(model.iterations, sol.iterations);
    grad2 += sol.gradient_norm * sol.gradient_norm;
    model.objective += sol.value;
  }
  model.gradient_norm = std::sqrt(grad2);
  return model;
}

double logreg_objective(const FeatureMatrix& x, std::span<const int> labels, std::size_t classes, double l2,
                        LogregMode mode, std::span<const double> params) {
  check_inputs(x, labels, classes, mode, params);
  std::vector<double> g(params.size());
  if (mode == LogregMode::softmax) return softmax_eval(x, labels, classes, l2)(params, g);
  const std::size_t stride = x.cols + 1;
  const std::size_t blocks = mode == LogregMode::binary ? 1 : classes;
  double total = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const int positive = mode == LogregMode::binary ? 1 : static_cast<int>(b);
    total += binary_eval(x, indicator(labels, positive), l2)(params.subspan(b * stride, stride),
                                                                std::span<double>(g).subspan(b * stride, stride));
  }
  return total;
}

std::vector<double> LogisticModel::predict_proba(std::span<const double> x) const {
  if (x.size() != dim) throw UsageError("feature row has the wrong dimension");
  const std::size_t stride = dim + 1;
  auto score = [&](std::size_t b) { return simd::dot(params.data() + b * stride, x.data(), dim) + params[b * stride + dim]; };
  std::vector<double> prob(classes);
  switch (mode) {
    case LogregMode::binary: {
      const double p1 = sigmoid(score(0));
      prob[0] = 1.0 - p1;
      prob[1] = p1;
      break;
    }
    case LogregMode::one_vs_rest: {
      double sum = 0.0;
      for (std::size_t c = 0; c < classes; ++c) sum += prob[c] = sigmoid(score(c));
      for (double& p : prob) p = sum > 0.0 ? p / sum : 1.0 / static_cast<double>(classes);
      break;
    }
    case LogregMode::softmax: {
      double top = -INFINITY;
      for (std::size_t c = 0; c < classes; ++c) top = std::max(top, prob[c] = score(c));
      double sum = 0.0;
      for (double& p : prob) sum += p = std::exp(p - top);
      for (double& p : prob) p /= sum;
      break;
    }
  }
  return prob;
}

std::size_t LogisticModel::predict(std::span<const double> x) const {
  auto prob = predict_proba(x);
  return static_cast<std::size_t>(std::max_element(prob.begin(), prob.end()) - prob.begin());
}

}  // namespace mvembed
