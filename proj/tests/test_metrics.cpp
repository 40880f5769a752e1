#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "mvembed/common.hpp"
#include "mvembed/metrics.hpp"
#include "metric_oracles.hpp"

using namespace mvembed;

TEST_CASE("perfect ranking scores one") {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  const std::vector<int> y{1, 1, 0, 0};
  CHECK(*roc_auc(s, y) == 1.0);
  CHECK(*auprc(s, y) == 1.0);
}

TEST_CASE("four-point example") {
  const std::vector<double> s{0.9, 0.8, 0.4, 0.2};
  const std::vector<int> y{1, 0, 1, 0};
  CHECK(*roc_auc(s, y) == 0.75);
  CHECK(*roc_auc(s, y) == oracle_metrics::pairwise_auc(s, y));
  // Precision 1 at recall 0.5, then 2/3 at recall 1.
  CHECK(*auprc(s, y) == doctest::Approx(0.5 + 0.5 * 2.0 / 3.0));
}

TEST_CASE("ties count half") {
  const std::vector<double> s{0.5, 0.5, 0.5, 0.5};
  const std::vector<int> y{1, 0, 1, 0};
  CHECK(*roc_auc(s, y) == 0.5);
  CHECK(*auprc(s, y) == 0.5);
}

TEST_CASE("random scores give chance-level area") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(10000);
  std::vector<int> y(10000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = u(rng);
    y[i] = i % 2;
  }
  CHECK(std::abs(*roc_auc(s, y) - 0.5) < 0.02);
}

TEST_CASE("rank statistic equals brute force on random tied sets") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    auto [s, y] = oracle_metrics::random_set(50, rng);
    auto auc = roc_auc(s, y);
    if (!auc) continue;
    CHECK(*auc == oracle_metrics::pairwise_auc(s, y));
    CHECK(std::abs(*roc_auc_trapezoid(s, y) - *auc) < 1e-10);
    CHECK(std::abs(*auprc(s, y) - oracle_metrics::threshold_auprc(s, y)) < 1e-12);
  }
}

TEST_CASE("metrics are undefined for one-class sets") {
  const std::vector<double> s{0.1, 0.2};
  CHECK_FALSE(roc_auc(s, std::vector<int>{1, 1}).has_value());
  CHECK_FALSE(roc_auc(s, std::vector<int>{0, 0}).has_value());
  CHECK_FALSE(auprc(s, std::vector<int>{0, 0}).has_value());
  CHECK(auprc(s, std::vector<int>{1, 1}).has_value());
  CHECK_THROWS_AS(roc_auc(s, std::vector<int>{1}), UsageError);
}

TEST_CASE("accuracy and cross-entropy") {
  const std::vector<double> p{0.7, 0.2, 0.1, 0.1, 0.3, 0.6};
  const std::vector<int> y{0, 1};
  CHECK(accuracy(p, 3, y) == 0.5);
  CHECK(cross_entropy(p, 3, y) == doctest::Approx(-(std::log(0.7) + std::log(0.3)) / 2));
  const std::vector<double> certain{1.0, 0.0};
  CHECK(std::isfinite(cross_entropy(certain, 2, std::vector<int>{1})));
}

TEST_CASE("summary mean and standard error") {
  MetricSummary m{"x", {1.0, 2.0, 3.0, 4.0}};
  CHECK(m.mean() == 2.5);
  CHECK(m.standard_error() == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  MetricSummary one{"y", {3.0}};
  CHECK(one.standard_error() == 0.0);
}
