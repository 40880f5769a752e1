#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "mvembed/graph.hpp"

namespace mvembed {

struct SynthConfig {
  double p = 0.0;  // intrusion probability
  std::uint32_t nodes_per_class = 1000;
  std::uint32_t m = 1;  // edges per attached node
  std::uint64_t seed = 1;

  void validate() const;
};

inline constexpr std::array<char, 4> kSynthClasses{'A', 'B', 'C', 'D'};

struct LabeledNetwork {
  MultiViewNetwork net;       // views "v1", "v2"
  std::vector<std::uint8_t> labels;  // class index into kSynthClasses, by node id
  std::size_t generated_edges = 0;
  std::size_t intruded_edges = 0;
};

// Four preferential-attachment graphs over A+B, C+D (bound for v1) and A+C, B+D (bound for v2).
// Each edge moves to the other view with probability p.
LabeledNetwork generate(const SynthConfig& cfg);

// p = 0, 0.1, ..., 0.5.
std::vector<SynthConfig> default_series(std::uint64_t base_seed = 1);

// `node<TAB>class` per node.
void write_labels(std::ostream& out, const LabeledNetwork& data);
void save_labels(const std::filesystem::path& path, const LabeledNetwork& data);

}  // namespace mvembed
