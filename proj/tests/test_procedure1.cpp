#include <gtest/gtest.h>

#include "fixture.hpp"
#include "serial/generator.hpp"
#include "serial/oracle.hpp"
#include "serial/propagation.hpp"

using namespace serial;
using serial::test::load_fixture;

namespace {

LogicGraph cone(const Netlist& nl, NodeKind kind, const std::string& name) {
  const EndpointIndex index(nl);
  return build_logic_graph(nl, index, gate_ldf_table(nl), *index.find(kind, name));
}

double df_of(const Procedure1Result& r, const EndpointIndex& index, NodeKind kind, const std::string& name) {
  const auto node = *index.find(kind, name);
  for (const auto& [tail, v] : r.df)
    if (tail == node) return v;
  return 0.0;
}

}  // namespace

TEST(Procedure1, FirstIterationLeavesTheReconvergenceMismatch) {
  const auto nl = load_fixture("reconvergent");
  const auto lg = cone(nl, NodeKind::FlipFlop, "b");
  PropagationOptions one;
  one.max_iters = 1;
  one.throw_on_nonconvergence = false;
  const auto r = procedure1(lg, one);
  // Node j is local 3 (gates sorted h, i, j, k, x). It holds 0.375 but has only sent 0.125 + 0.125.
  EXPECT_DOUBLE_EQ(r.ls[3], 0.375);
  double sent = 0.0;
  for (auto a = lg.first_arrow[3]; a < lg.first_arrow[4]; ++a) sent += r.ldw[a];
  EXPECT_DOUBLE_EQ(sent, 0.25);
  EXPECT_FALSE(r.report.converged);
  EXPECT_DOUBLE_EQ(r.report.eps_trace[0], 0.5);
}

TEST(Procedure1, ReconvergentConeConvergesExactlyOnSecondIteration) {
  const auto nl = load_fixture("reconvergent");
  const EndpointIndex index(nl);
  PropagationOptions exact;
  exact.eps_threshold = 0.0;
  const auto r = procedure1(cone(nl, NodeKind::FlipFlop, "b"), exact);
  EXPECT_EQ(r.report.iterations, 2);
  EXPECT_EQ(r.report.eps_trace.back(), 0.0);
  EXPECT_DOUBLE_EQ(df_of(r, index, NodeKind::FlipFlop, "d"), 0.375);
  EXPECT_DOUBLE_EQ(df_of(r, index, NodeKind::FlipFlop, "e"), 0.25);
  EXPECT_DOUBLE_EQ(df_of(r, index, NodeKind::FlipFlop, "f"), 0.1875);
  EXPECT_DOUBLE_EQ(df_of(r, index, NodeKind::FlipFlop, "g"), 0.1875);
}

TEST(Procedure1, WireConeConvergesInOneIteration) {
  const auto nl = load_fixture("shift2");
  const auto r = procedure1(cone(nl, NodeKind::Output, "out"));
  EXPECT_EQ(r.report.iterations, 1);
  EXPECT_EQ(r.report.eps_trace, std::vector<double>{0.0});
  ASSERT_EQ(r.df.size(), 1u);
  EXPECT_EQ(r.df[0].second, 1.0);
}

TEST(Procedure1, ErrorReachesZeroWithinMaxDepth) {
  for (const char* name : serial::test::kFixtures) {
    const auto nl = load_fixture(name);
    const int bound = std::max(1, levelize(nl).max_depth);
    PropagationOptions exact;
    exact.eps_threshold = 0.0;
    exact.max_iters = bound;
    const auto dfc = procedure1_all(nl, exact);
    for (const auto& rep : dfc.reports) {
      EXPECT_TRUE(rep.converged) << name;
      EXPECT_LE(rep.iterations, bound) << name;
      EXPECT_EQ(rep.final_eps(), 0.0) << name;
    }
  }
}

TEST(Procedure1, MatchesPathEnumerationOnSmallGeneratedCones) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorSpec spec;
    spec.inputs = 5;
    spec.outputs = 3;
    spec.flipflops = 4;
    spec.gates = 40;
    spec.degree = 5;
    spec.reuse_probability = 0.6;
    spec.seed = seed;
    const auto nl = generate(spec);
    const EndpointIndex index(nl);
    PropagationOptions exact;
    exact.eps_threshold = 0.0;
    const auto dfc = procedure1_all(nl, exact);
    for (std::uint32_t head = 0; head < index.outputs() + index.flipflops(); ++head) {
      if (cone_gate_count(nl, index, head) > 20) continue;
      const auto row = path_enumeration_df(nl, index, head);
      double total = 0.0;
      for (const auto& [tail, v] : row) {
        EXPECT_NEAR(dfc.df(head, tail), v, 1e-9) << "seed " << seed << " head " << index.name(head);
        total += dfc.df(head, tail);
      }
      EXPECT_NEAR(dfc.df.df.col(head).sum(), total, 1e-9);
    }
  }
}

TEST(Procedure1, NonConvergenceIsReported) {
  const auto nl = load_fixture("reconvergent");
  PropagationOptions tight;
  tight.eps_threshold = 0.0;
  tight.max_iters = 1;
  EXPECT_THROW(procedure1(cone(nl, NodeKind::FlipFlop, "b"), tight), NonConvergence);
  EXPECT_THROW(procedure1_all(nl, tight), NonConvergence);
  tight.throw_on_nonconvergence = false;
  const auto dfc = procedure1_all(nl, tight);
  EXPECT_FALSE(dfc.reports[*EndpointIndex(nl).find(NodeKind::FlipFlop, "b")].converged);
}

TEST(Procedure1, ThreadCountDoesNotChangeResults) {
  GeneratorSpec spec;
  spec.gates = 2000;
  spec.flipflops = 200;
  spec.inputs = 16;
  spec.outputs = 16;
  spec.degree = 8;
  const auto nl = generate(spec);
  const auto a = procedure1_all(nl, {}, 1);
  const auto b = procedure1_all(nl, {}, 8);
  EXPECT_EQ(Eigen::MatrixXd(a.df.df), Eigen::MatrixXd(b.df.df));
  EXPECT_EQ(a.mean_iterations, b.mean_iterations);
}

TEST(Procedure1, OneThousandGateCircuitIsQuick) {
  GeneratorSpec spec;
  spec.gates = 1000;
  spec.flipflops = 100;
  spec.inputs = 16;
  spec.outputs = 8;
  spec.degree = 6;
  const auto nl = generate(spec);
  const auto dfc = procedure1_all(nl);
  EXPECT_GT(dfc.df.df.nonZeros(), 0);
  EXPECT_LE(dfc.mean_iterations, levelize(nl).max_depth);
}
