#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mvembed {

// Dense row-major feature rows.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
  void append(std::span<const double> r);
};

enum class LogregMode { binary, one_vs_rest, softmax };

struct LogregOptions {
  std::size_t max_iterations = 1000;
  double tolerance = 1e-6;  // on the gradient norm
};

inline constexpr double kL2Grid[] = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};

// Objective per output block: (sum of log-losses + l2/2 * ||w||^2) / n, so l2 plays the role of 1/C.
// The intercept is not penalized.
struct LogisticModel {
  LogregMode mode = LogregMode::binary;
  std::size_t classes = 2;
  std::size_t dim = 0;
  double l2 = 0.0;
  // One block of dim + 1 values (weights, then intercept) per output: 1 for binary, else `classes`.
  std::vector<double> params;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;

  std::size_t blocks() const { return mode == LogregMode::binary ? 1 : classes; }
  // Class probabilities; length `classes` (2 for binary).
  std::vector<double> predict_proba(std::span<const double> x) const;
  std::size_t predict(std::span<const double> x) const;
};

// Labels are class indices in [0, classes). Binary mode requires classes == 2.
// `init`, when non-empty, warm-starts the parameters (same layout as LogisticModel::params).
LogisticModel train_logreg(const FeatureMatrix& x, std::span<const int> labels, std::size_t classes, double l2,
                           LogregMode mode, const LogregOptions& options = {}, std::span<const double> init = {});

// Objective value of `params` for the given data, as minimized by train_logreg.
double logreg_objective(const FeatureMatrix& x, std::span<const int> labels, std::size_t classes, double l2,
                        LogregMode mode, std::span<const double> params);

}  // namespace mvembed
