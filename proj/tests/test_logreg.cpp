#include <doctest.h>

#include <cmath>
#include <random>

#include "mvembed/common.hpp"
#include "mvembed/logreg.hpp"

using namespace mvembed;

namespace {

struct Blobs {
  FeatureMatrix x;
  std::vector<int> y;
};

Blobs blobs(std::size_t per_class, std::size_t classes, std::size_t dim, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spread);
  Blobs b;
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<double> row(dim);
      for (std::size_t k = 0; k < dim; ++k) row[k] = (k % classes == c ? 1.0 : 0.0) + noise(rng);
      b.x.append(row);
      b.y.push_back(static_cast<int>(c));
    }
  return b;
}

double gradient_norm(const FeatureMatrix& x, std::span<const int> y, std::size_t classes, double l2, LogregMode mode,
                     std::vector<double> params) {
  // Central differences of the objective as an independent gradient.
  double total = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double keep = params[k];
    const double h = 1e-6;
    params[k] = keep + h;
    const double up = logreg_objective(x, y, classes, l2, mode, params);
    params[k] = keep - h;
    const double down = logreg_objective(x, y, classes, l2, mode, params);
    params[k] = keep;
    const double g = (up - down) / (2 * h);
    total += g * g;
  }
  return std::sqrt(total);
}

}  // namespace

TEST_CASE("separable two-point set is fit perfectly") {
  FeatureMatrix x;
  x.append(std::vector<double>{1.0, 0.0});
  x.append(std::vector<double>{-1.0, 0.0});
  const std::vector<int> y{1, 0};
  auto m = train_logreg(x, y, 2, 1e-4, LogregMode::binary);
  CHECK(m.predict(x.row(0)) == 1);
  CHECK(m.predict(x.row(1)) == 0);
}

TEST_CASE("converged fits have a vanishing gradient") {
  auto data = blobs(40, 3, 5, 0.8, 1);
  for (LogregMode mode : {LogregMode::softmax, LogregMode::one_vs_rest}) {
    auto m = train_logreg(data.x, data.y, 3, 1e-2, mode);
    CHECK(m.gradient_norm <= 1e-6 * std::sqrt(static_cast<double>(m.blocks())));
    CHECK(gradient_norm(data.x, data.y, 3, 1e-2, mode, m.params) < 1e-5);
    CHECK(m.objective == doctest::Approx(logreg_objective(data.x, data.y, 3, 1e-2, mode, m.params)));
  }
  std::vector<int> binary(data.y.size());
  for (std::size_t i = 0; i < binary.size(); ++i) binary[i] = data.y[i] == 0;
  auto m = train_logreg(data.x, binary, 2, 1e-3, LogregMode::binary);
  CHECK(gradient_norm(data.x, binary, 2, 1e-3, LogregMode::binary, m.params) < 1e-5);
}

TEST_CASE("the optimum does not depend on the starting point") {
  auto data = blobs(30, 4, 6, 1.0, 2);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  const double reference = train_logreg(data.x, data.y, 4, 1e-2, LogregMode::softmax).objective;
  for (int start = 0; start < 5; ++start) {
    std::vector<double> init(4 * 7);
    for (auto& v : init) v = g(rng);
    auto m = train_logreg(data.x, data.y, 4, 1e-2, LogregMode::softmax, {}, init);
    CHECK(std::abs(m.objective - reference) < 1e-6);
  }
}

TEST_CASE("very strong penalties shrink toward the class prior") {
  auto data = blobs(30, 2, 4, 0.5, 4);
  // Unbalance the classes: drop half of class 1.
  FeatureMatrix x;
  std::vector<int> y;
  for (std::size_t i = 0; i < data.y.size(); ++i)
    if (data.y[i] == 0 || i % 2 == 0) {
      x.append(data.x.row(i));
      y.push_back(data.y[i]);
    }
  auto m = train_logreg(x, y, 2, 1e6, LogregMode::binary);
  double prior = 0.0;
  for (int l : y) prior += l;
  prior /= static_cast<double>(y.size());
  for (std::size_t k = 0; k < x.cols; ++k) CHECK(std::abs(m.params[k]) < 1e-4);
  CHECK(m.predict_proba(x.row(0))[1] == doctest::Approx(prior).epsilon(1e-3));
}

TEST_CASE("probabilities form a distribution in every mode") {
  auto data = blobs(20, 3, 4, 0.7, 5);
  for (LogregMode mode : {LogregMode::softmax, LogregMode::one_vs_rest}) {
    auto m = train_logreg(data.x, data.y, 3, 0.1, mode);
    for (std::size_t i = 0; i < data.x.rows; ++i) {
      auto p = m.predict_proba(data.x.row(i));
      double sum = 0.0;
      for (double v : p) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(sum == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("invalid training data is rejected") {
  FeatureMatrix x;
  x.append(std::vector<double>{1.0});
  x.append(std::vector<double>{2.0});
  CHECK_THROWS_AS(train_logreg(x, std::vector<int>{1, 1}, 2, 1.0, LogregMode::binary), ValidationError);
  CHECK_THROWS_AS(train_logreg(x, std::vector<int>{0, 2}, 2, 1.0, LogregMode::binary), UsageError);
  CHECK_THROWS_AS(train_logreg(x, std::vector<int>{0}, 2, 1.0, LogregMode::binary), UsageError);
  CHECK_THROWS_AS(train_logreg(x, std::vector<int>{0, 1}, 3, 1.0, LogregMode::binary), UsageError);
  CHECK_THROWS_AS(x.append(std::vector<double>{1.0, 2.0}), UsageError);
}
