#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mvembed/graph.hpp"

namespace mvembed {

// |N_a(u) & N_b(u)| / |N_a(u) | N_b(u)|; empty when u has no neighbor in either view.
std::optional<double> node_jaccard(const MultiViewNetwork& net, NodeId u, ViewId a, ViewId b);

inline constexpr std::size_t kJaccardBins = 20;

struct ViewPairAgreement {
  ViewId a = 0;
  ViewId b = 0;
  double threshold = 0.5;
  std::size_t nodes_considered = 0;
  std::size_t above_threshold = 0;
  // Equal-width bins over [0, 1]; J = 1 falls into the last bin.
  std::array<std::size_t, kJaccardBins> histogram{};

  double proportion() const {
    return nodes_considered == 0 ? 0.0 : static_cast<double>(above_threshold) / static_cast<double>(nodes_considered);
  }
};

struct AgreementReport {
  double threshold = 0.5;
  std::vector<ViewPairAgreement> pairs;  // a < b, lexicographic
};

AgreementReport agreement_report(const MultiViewNetwork& net, double threshold = 0.5);

// view_a,view_b,threshold,proportion,n_nodes_considered
void write_agreement_csv(std::ostream& out, const MultiViewNetwork& net, const AgreementReport& report);
// view_a,view_b,bin_low,bin_high,count
void write_histogram_csv(std::ostream& out, const MultiViewNetwork& net, const AgreementReport& report);

}  // namespace mvembed
