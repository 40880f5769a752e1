#include "mvembed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mvembed/common.hpp"

namespace mvembed {

namespace {

void check_sizes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw UsageError("scores and labels differ in length");
}

// Indices sorted by descending score.
std::vector<std::size_t> descending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_sizes(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positives = 0.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1..j share their average.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] != 0) {
        positives += 1.0;
        rank_sum += rank;
      }
    i = j;
  }
  const double negatives = static_cast<double>(scores.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) return std::nullopt;
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

std::optional<double> roc_auc_trapezoid(std::span<const double> scores, std::span<const int> labels) {
  check_sizes(scores, labels);
  auto order = descending(scores);
  double pos = 0.0, neg = 0.0;
  for (int l : labels) (l != 0 ? pos : neg) += 1.0;
  if (pos == 0.0 || neg == 0.0) return std::nullopt;
  double area = 0.0, tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double prev_tp = tp, prev_fp = fp;
    std::size_t j = i;
    for (; j < order.size() && scores[order[j]] == scores[order[i]]; ++j) (labels[order[j]] != 0 ? tp : fp) += 1.0;
    area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
    i = j;
  }
  return area / (pos * neg);
}

std::optional<double> auprc(std::span<const double> scores, std::span<const int> labels) {
  check_sizes(scores, labels);
  auto order = descending(scores);
  double pos = 0.0;
  for (int l : labels) pos += l != 0 ? 1.0 : 0.0;
  if (pos == 0.0) return std::nullopt;
  double area = 0.0, tp = 0.0, seen = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    for (; j < order.size() && scores[order[j]] == scores[order[i]]; ++j) {
      seen += 1.0;
      if (labels[order[j]] != 0) tp += 1.0;
    }
    const double recall = tp / pos;
    area += (recall - prev_recall) * (tp / seen);
    prev_recall = recall;
    i = j;
  }
  return area;
}

double accuracy(std::span<const double> probabilities, std::size_t classes, std::span<const int> labels) {
  if (probabilities.size() != labels.size() * classes) throw UsageError("probability matrix has the wrong shape");
  if (labels.empty()) throw UsageError("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto row = probabilities.subspan(i * classes, classes);
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    if (best == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double cross_entropy(std::span<const double> probabilities, std::size_t classes, std::span<const int> labels) {
  if (probabilities.size() != labels.size() * classes) throw UsageError("probability matrix has the wrong shape");
  if (labels.empty()) throw UsageError("cross-entropy of an empty set");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    total -= std::log(std::clamp(probabilities[i * classes + static_cast<std::size_t>(labels[i])], 1e-15, 1.0));
  return total / static_cast<double>(labels.size());
}

double MetricSummary::mean() const {
  if (runs.empty()) return std::nan("");
  return std::accumulate(runs.begin(), runs.end(), 0.0) / static_cast<double>(runs.size());
}

double MetricSummary::standard_error() const {
  if (runs.size() < 2) return 0.0;
  const double m = mean();
  double ss = 0.0;
  for (double r : runs) ss += (r - m) * (r - m);
  const double n = static_cast<double>(runs.size());
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

}  // namespace mvembed
