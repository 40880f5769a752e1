#include "mvembed/viewstats.hpp"

#include <algorithm>
#include <ostream>

namespace mvembed {

std::optional<double> node_jaccard(const MultiViewNetwork& net, NodeId u, ViewId a, ViewId b) {
  if (a == b) throw UsageError("node_jaccard needs two different views");
  auto na = net.view(a).neighbors(u);
  auto nb = net.view(b).neighbors(u);
  if (na.empty() && nb.empty()) return std::nullopt;
  // Both rows are sorted.
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < na.size() && j < nb.size();) {
    if (na[i] == nb[j]) {
      ++common;
      ++i;
      ++j;
    } else if (na[i] < nb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(na.size() + nb.size() - common);
}

AgreementReport agreement_report(const MultiViewNetwork& net, double threshold) {
  if (net.num_views() < 2) throw UsageError("agreement needs at least two views");
  AgreementReport report;
  report.threshold = threshold;
  for (ViewId a = 0; a < net.num_views(); ++a)
    for (ViewId b = a + 1; b < net.num_views(); ++b) {
      ViewPairAgreement pair;
      pair.a = a;
      pair.b = b;
      pair.threshold = threshold;
      for (NodeId u = 0; u < net.num_nodes(); ++u) {
        auto j = node_jaccard(net, u, a, b);
        if (!j) continue;
        ++pair.nodes_considered;
        if (*j > threshold) ++pair.above_threshold;
        const auto bin = std::min(kJaccardBins - 1, static_cast<std::size_t>(*j * kJaccardBins));
        ++pair.histogram[bin];
      }
      report.pairs.push_back(pair);
    }
  return report;
}

void write_agreement_csv(std::ostream& out, const MultiViewNetwork& net, const AgreementReport& report) {
  out << "view_a,view_b,threshold,proportion,n_nodes_considered\n";
  for (const auto& p : report.pairs)
    out << net.view_name(p.a) << ',' << net.view_name(p.b) << ',' << p.threshold << ',' << p.proportion() << ','
        << p.nodes_considered << '\n';
}

void write_histogram_csv(std::ostream& out, const MultiViewNetwork& net, const AgreementReport& report) {
  out << "view_a,view_b,bin_low,bin_high,count\n";
  for (const auto& p : report.pairs)
    for (std::size_t k = 0; k < kJaccardBins; ++k)
      out << net.view_name(p.a) << ',' << net.view_name(p.b) << ',' << static_cast<double>(k) / kJaccardBins << ','
          << static_cast<double>(k + 1) / kJaccardBins << ',' << p.histogram[k] << '\n';
}

}  // namespace mvembed
