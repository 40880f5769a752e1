#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mvembed {

// Walker/Vose alias table: O(n) construction, O(1) draws proportional to the input masses.
class AliasTable {
 public:
  AliasTable() = default;
  // Masses must be non-negative, finite and not all zero.
  explicit AliasTable(std::span<const double> masses);

  std::size_t size() const noexcept { return prob_.size(); }
  bool empty() const noexcept { return prob_.empty(); }

  template <class Rng>
  std::uint32_t sample(Rng& rng) const {
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(prob_.size() - 1));
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uint32_t k = pick(rng);
    return coin(rng) < prob_[k] ? k : alias_[k];
  }

  // Probability of drawing index k, reconstructed from the table.
  double probability(std::uint32_t k) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace mvembed
