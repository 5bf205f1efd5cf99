#include <gtest/gtest.h>

#include <map>

#include "fixture.hpp"
#include "serial/graphs.hpp"
#include "serial/propagation.hpp"

using namespace serial;
using serial::test::load_fixture;

namespace {

SignificanceGraph graph_of(const Netlist& nl, const std::set<std::string>& clk_reset = {}) {
  return build_significance_graph(nl, procedure1_all(nl).df, clk_reset);
}

// head name -> {tail name -> df}, with head names prefixed by kind.
std::map<std::string, std::map<std::string, double>> arrows_by_name(const SignificanceGraph& g) {
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& a : g.arrows())
    out[std::string(to_string(g.index().kind(a.head))) + " " + g.index().name(a.head)][g.index().name(a.tail)] = a.df;
  return out;
}

}  // namespace

TEST(EndpointIndex, BlocksAreSortedByName) {
  const auto nl = load_fixture("s27");
  const EndpointIndex index(nl);
  ASSERT_EQ(index.size(), 8u);
  const std::vector<std::string> names{"G17", "G5", "G6", "G7", "G0", "G1", "G2", "G3"};
  for (std::uint32_t i = 0; i < names.size(); ++i) EXPECT_EQ(index.name(i), names[i]);
  EXPECT_EQ(index.kind(0), NodeKind::Output);
  EXPECT_EQ(index.kind(1), NodeKind::FlipFlop);
  EXPECT_EQ(index.kind(4), NodeKind::Input);
  EXPECT_EQ(*index.find(NodeKind::FlipFlop, "G7"), 3u);
  EXPECT_FALSE(index.find(NodeKind::Input, "G7"));
}

TEST(LogicGraph, ReconvergentConeLayout) {
  const auto nl = load_fixture("reconvergent");
  const EndpointIndex index(nl);
  const auto b = *index.find(NodeKind::FlipFlop, "b");
  const auto lg = build_logic_graph(nl, index, gate_ldf_table(nl), b);
  EXPECT_EQ(lg.gates.size(), 5u);  // h i j k x
  EXPECT_EQ(lg.sinks.size(), 4u);  // d e f g
  EXPECT_EQ(lg.arrows.size(), 11u);
  EXPECT_EQ(lg.first_arrow.size(), lg.node_count() + 1);
}

TEST(LogicGraph, ConstantConeIsReported) {
  GateLibrary lib;
  lib.add("ONE", TruthTable::from_bitstring("11"));
  const auto nl = parse_bench("INPUT(a)\nOUTPUT(x)\nx = ONE(a)\n", &lib);
  const EndpointIndex index(nl);
  EXPECT_THROW(build_logic_graph(nl, index, gate_ldf_table(nl), 0), EmptyConeError);
  const auto dfc = procedure1_all(nl);
  EXPECT_EQ(dfc.constant_cones, (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(dfc.df.df.nonZeros(), 0);
}

TEST(DFMatrix, ShiftRegisterHasThreeUnitEntries) {
  const auto nl = load_fixture("shift2");
  const auto dfc = procedure1_all(nl);
  EXPECT_EQ(dfc.df.df.rows(), 3);  // n + m
  EXPECT_EQ(dfc.df.df.cols(), 3);  // k + n
  EXPECT_EQ(dfc.df.df.nonZeros(), 3);
  for (int c = 0; c < dfc.df.df.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(dfc.df.df, c); it; ++it) EXPECT_EQ(it.value(), 1.0);
}

TEST(DFMatrix, ColumnsSumToOne) {
  for (const char* name : serial::test::kFixtures) {
    const auto dfc = procedure1_all(load_fixture(name));
    for (int c = 0; c < dfc.df.df.cols(); ++c) EXPECT_NEAR(dfc.df.df.col(c).sum(), 1.0, 1e-9) << name << " col " << c;
  }
}

TEST(DFMatrix, ShapeFollowsEndpointCounts) {
  const auto dfc = procedure1_all(load_fixture("s27"));
  EXPECT_EQ(dfc.df.df.rows(), 3 + 4);
  EXPECT_EQ(dfc.df.df.cols(), 1 + 3);
}

TEST(SignificanceGraph, AdjacencyMatchesEnumerationScript) {
  // Endpoint reachability and path-enumeration df from tests/oracles/derive_fixture_values.py.
  const auto s27 = arrows_by_name(graph_of(load_fixture("s27")));
  const std::map<std::string, std::map<std::string, double>> expected{
      {"output G17", {{"G0", 0.125}, {"G1", 0.0625}, {"G3", 0.125}, {"G5", 0.5}, {"G6", 0.125}, {"G7", 0.0625}}},
      {"ff G5",
       {{"G0", 0.5625}, {"G1", 0.03125}, {"G3", 0.0625}, {"G5", 0.25}, {"G6", 0.0625}, {"G7", 0.03125}}},
      {"ff G6", {{"G0", 0.125}, {"G1", 0.0625}, {"G3", 0.125}, {"G5", 0.5}, {"G6", 0.125}, {"G7", 0.0625}}},
      {"ff G7", {{"G1", 0.25}, {"G2", 0.5}, {"G7", 0.25}}},
  };
  ASSERT_EQ(s27.size(), expected.size());
  for (const auto& [head, tails] : expected) {
    ASSERT_EQ(s27.at(head).size(), tails.size()) << head;
    for (const auto& [tail, df] : tails) EXPECT_NEAR(s27.at(head).at(tail), df, 1e-12) << head << "->" << tail;
  }

  const auto counter = arrows_by_name(graph_of(load_fixture("counter2")));
  EXPECT_EQ(counter.at("output c0").size(), 1u);
  EXPECT_EQ(counter.at("ff c1").size(), 3u);
  EXPECT_NEAR(counter.at("ff c1").at("up"), 1.0 / 3.0, 1e-12);
}

TEST(SignificanceGraph, ClockAndResetGetZeroConfidence) {
  const auto nl = load_fixture("s27");
  const auto g = graph_of(nl, {"G0"});
  for (const auto& a : g.arrows())
    EXPECT_EQ(a.confidence, g.index().name(a.tail) == "G0" ? 0.0 : 1.0);
  EXPECT_THROW(graph_of(nl, {"missing"}), Error);
}

TEST(SignificanceGraph, ArrowsAreGroupedByHead) {
  const auto g = graph_of(load_fixture("s27"));
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    const auto [b, e] = g.out_range(v);
    for (auto a = b; a < e; ++a) EXPECT_EQ(g.arrows()[a].head, v);
  }
}

TEST(Stats, DegreeNodeMatchesScript) {
  const std::pair<const char*, double> expected[] = {
      {"shift2", 1.0}, {"loop", 1.4}, {"reconvergent", 1.5}, {"counter2", 2.0}, {"s27", 5.25}, {"gen_seq", 4.875}};
  for (const auto& [name, degree] : expected) {
    const auto nl = load_fixture(name);
    const auto s = stats(nl, graph_of(nl));
    EXPECT_NEAR(s.degree_node, degree, 1e-12) << name;
    EXPECT_EQ(s.node_count, nl.inputs().size() + nl.outputs().size() + nl.flipflops().size());
  }
}
