#include <doctest.h>

#include <sstream>

#include "mvembed/graph.hpp"

using namespace mvembed;

namespace {

MultiViewNetwork parse(const std::string& text, bool binarize = false) {
  std::istringstream in(text);
  return read_network(in, LoadOptions{binarize}, "test");
}

}  // namespace

TEST_CASE("views and nodes are interned in first-seen order") {
  auto net = parse("friend\ta\tb\nreply\tb\tc\t2.5\nfriend\tc\ta\n");
  CHECK(net.num_nodes() == 3);
  CHECK(net.num_views() == 2);
  CHECK(net.view_name(0) == "friend");
  CHECK(net.node_label(2) == "c");
  CHECK(net.view(0).num_edges() == 2);
  CHECK(net.view(1).weight(1, 2) == 2.5);
  CHECK(net.view(1).weight(2, 1) == 2.5);
  CHECK(net.view(1).weight(0, 1) == 0.0);
  CHECK(net.total_edges() == 3);
}

TEST_CASE("duplicate edges sum their weights in either direction") {
  auto net = parse("v\ta\tb\t1\nv\tb\ta\t2\nv\ta\tb\n");
  CHECK(net.view(0).num_edges() == 1);
  CHECK(net.view(0).weight(0, 1) == 4.0);
  CHECK(net.view(0).total_weight() == 4.0);
}

TEST_CASE("binarize collapses duplicates to weight one") {
  auto net = parse("v\ta\tb\t3\nv\tb\ta\t2\nv\tb\tc\t0.5\n", true);
  CHECK(net.view(0).weight(0, 1) == 1.0);
  CHECK(net.view(0).weight(1, 2) == 1.0);
}

TEST_CASE("comments, blank lines and CRLF are accepted") {
  auto net = parse("# header\n\nv\ta\tb\r\n");
  CHECK(net.view(0).num_edges() == 1);
}

TEST_CASE("malformed lines report their line number") {
  try {
    parse("v\ta\tb\nv\ta\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("v\ta\tb\tx\n"), ParseError);
  CHECK_THROWS_AS(parse("v\ta\tb\t1\textra\n"), ParseError);
}

TEST_CASE("self-loops and non-positive weights are rejected") {
  CHECK_THROWS_AS(parse("v\ta\ta\n"), ValidationError);
  CHECK_THROWS_AS(parse("v\ta\tb\t0\n"), ValidationError);
  CHECK_THROWS_AS(parse("v\ta\tb\t-1\n"), ValidationError);
}

TEST_CASE("adjacency rows are sorted and symmetric") {
  auto net = parse("v\td\ta\nv\ta\tc\nv\ta\tb\nv\tc\td\n");
  const auto& adj = net.view(0);
  for (NodeId u = 0; u < net.num_nodes(); ++u) {
    auto nb = adj.neighbors(u);
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    for (NodeId w : nb) CHECK(adj.weight(w, u) == adj.weight(u, w));
  }
  CHECK(adj.degree(*net.nodes().find("a")) == 3);
}

TEST_CASE("active view counts and non-isolated counts") {
  auto net = parse("x\ta\tb\ny\tb\tc\n");
  CHECK(net.active_view_count(0) == 1);
  CHECK(net.active_view_count(1) == 2);
  CHECK(non_isolated_count(net, 0) == 2);
  CHECK(non_isolated_count(net, 1) == 2);
}

TEST_CASE("canonical writer round-trips") {
  auto net = parse("x\tb\ta\t0.1\ny\tc\ta\nx\tc\tb\t3\n");
  std::ostringstream first;
  write_network(first, net);
  auto again = parse(first.str());
  std::ostringstream second;
  write_network(second, again);
  CHECK(first.str() == second.str());
  CHECK(again.view(0).weight(0, 1) == 0.1);
}

TEST_CASE("merge_views rescales each view to unit total weight") {
  auto net = parse("x\ta\tb\t2\nx\tb\tc\t2\ny\ta\tb\t10\n");
  auto merged = merge_views(net);
  CHECK(merged.num_views() == 1);
  CHECK(merged.num_nodes() == 3);
  CHECK(merged.view(0).weight(0, 1) == doctest::Approx(0.5 + 1.0));
  CHECK(merged.view(0).weight(1, 2) == doctest::Approx(0.5));
  CHECK(merged.view(0).total_weight() == doctest::Approx(2.0));
}

TEST_CASE("merge_views of an edgeless network fails") {
  NetworkBuilder b;
  b.add_node("a");
  b.add_view("x");
  CHECK_THROWS_AS(merge_views(b.build()), ValidationError);
}

TEST_CASE("select_view keeps node ids") {
  auto net = parse("x\ta\tb\ny\tc\td\n");
  auto only = select_view(net, 1);
  CHECK(only.num_views() == 1);
  CHECK(only.num_nodes() == 4);
  CHECK(only.view_name(0) == "y");
  CHECK(only.view(0).weight(2, 3) == 1.0);
  CHECK(only.view(0).degree(0) == 0);
  CHECK_THROWS_AS(select_view(net, 2), UsageError);
}

TEST_CASE("node dictionary output") {
  auto net = parse("x\tfoo\tbar\n");
  std::ostringstream out;
  write_node_dictionary(out, net);
  CHECK(out.str() == "0\tfoo\n1\tbar\n");
}
