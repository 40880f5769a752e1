#include "mvembed/alias_table.hpp"

#include <cmath>

#include "mvembed/common.hpp"

namespace mvembed {

AliasTable::AliasTable(std::span<const double> masses) {
  const std::size_t n = masses.size();
  if (n == 0) throw ValidationError("alias table needs at least one outcome");
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("alias table masses must be finite and >= 0");
    total += m;
  }
  if (!(total > 0.0)) throw ValidationError("alias table masses sum to zero");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = masses[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    auto s = small.back();
    small.pop_back();
    auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto l : large) {
    prob_[l] = 1.0;
    alias_[l] = l;
  }
  for (auto s : small) {
    prob_[s] = 1.0;
    alias_[s] = s;
  }
}

double AliasTable::probability(std::uint32_t k) const {
  const double n = static_cast<double>(prob_.size());
  double p = prob_[k];
  for (std::size_t j = 0; j < prob_.size(); ++j) {
    if (alias_[j] == k && j != k) p += 1.0 - prob_[j];
  }
  return p / n;
}

}  // namespace mvembed
