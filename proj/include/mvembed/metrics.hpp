#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mvembed {

// Mann-Whitney statistic with average ranks for ties. Empty if either class is absent.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels);
// Trapezoidal area under the empirical ROC curve (ties form diagonal segments).
std::optional<double> roc_auc_trapezoid(std::span<const double> scores, std::span<const int> labels);
// Step-wise area under the precision-recall curve: sum over distinct thresholds of
// (recall_k - recall_{k-1}) * precision_k. Empty if there are no positives.
std::optional<double> auprc(std::span<const double> scores, std::span<const int> labels);

// Fraction of rows whose argmax matches the label; probabilities are row-major n x classes.
double accuracy(std::span<const double> probabilities, std::size_t classes, std::span<const int> labels);
// Mean natural-log cross-entropy; probabilities are clamped to [1e-15, 1].
double cross_entropy(std::span<const double> probabilities, std::size_t classes, std::span<const int> labels);

struct MetricSummary {
  std::string metric;
  std::vector<double> runs;
  double mean() const;
  // Sample standard deviation over sqrt(runs); 0 for fewer than two runs.
  double standard_error() const;
};

}  // namespace mvembed
