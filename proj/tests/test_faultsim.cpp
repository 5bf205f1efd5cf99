#include <gtest/gtest.h>

#include <random>

#include "fixture.hpp"
#include "serial/faultsim.hpp"
#include "serial/oracle.hpp"

using namespace serial;
using serial::test::load_fixture;

namespace {

std::vector<std::uint32_t> all_ffs(const Netlist& nl) {
  std::vector<std::uint32_t> v;
  for (std::uint32_t f = 0; f < nl.flipflops().size(); ++f) v.push_back(f);
  return v;
}

double mean_rate(const Netlist& nl, double rate, std::uint64_t cycles, unsigned seeds) {
  double sum = 0.0;
  for (unsigned s = 0; s < seeds; ++s) {
    SimConfig sim;
    sim.cycles = cycles;
    sim.rng_seed = 100 + s;
    sum += simulate(nl, sim, {all_ffs(nl), rate, sim.rng_seed, {}}).report.output_bit_mismatch_rate;
  }
  return sum / seeds;
}

// Second, hand-written model of the 2-bit saturating counter with its own RNG.
double straight_line_counter(double p, std::uint64_t cycles, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5), flip(p);
  int good = 0, bad = 0;
  std::uint64_t wrong = 0;
  for (std::uint64_t c = 0; c < cycles; ++c) {
    const bool up = coin(rng);
    if (flip(rng)) bad ^= 1;
    if (flip(rng)) bad ^= 2;
    wrong += ((good ^ bad) & 1) + (((good ^ bad) >> 1) & 1);
    good = up ? std::min(good + 1, 3) : std::max(good - 1, 0);
    bad = up ? std::min(bad + 1, 3) : std::max(bad - 1, 0);
  }
  return static_cast<double>(wrong) / (2.0 * static_cast<double>(cycles));
}

}  // namespace

TEST(Simulate, ForcedFlipOnShiftRegisterShowsOneCycleLater) {
  const auto nl = load_fixture("shift2");
  SimConfig sim;
  sim.cycles = 30;
  FaultConfig fault;
  fault.forced.push_back({0, 12});  // FF1 in netlist order
  const auto r = simulate(nl, sim, fault, true);
  EXPECT_EQ(r.report.flips_injected, 1u);
  EXPECT_EQ(r.report.mismatched_bits, 1u);
  for (std::uint64_t c = 0; c < sim.cycles; ++c)
    EXPECT_EQ(r.golden_outputs[c][0] != r.faulty_outputs[c][0], c == 13) << c;
}

TEST(Simulate, FlipOnLastStageIsVisibleImmediately) {
  const auto nl = load_fixture("shift2");
  SimConfig sim;
  sim.cycles = 30;
  FaultConfig fault;
  fault.forced.push_back({1, 5});
  const auto r = simulate(nl, sim, fault, true);
  EXPECT_NE(r.golden_outputs[5][0], r.faulty_outputs[5][0]);
  EXPECT_EQ(r.report.mismatched_bits, 1u);
}

TEST(Simulate, ZeroRateMeansNoMismatch) {
  for (const char* name : serial::test::kFixtures) {
    const auto nl = load_fixture(name);
    SimConfig sim;
    sim.cycles = 2000;
    const auto r = simulate(nl, sim, {all_ffs(nl), 0.0, 1, {}});
    EXPECT_EQ(r.report.flips_injected, 0u);
    EXPECT_EQ(r.report.output_bit_mismatch_rate, 0.0);
  }
}

TEST(Simulate, AgreesWithReferenceSimulatorBitForBit) {
  for (const char* name : serial::test::kFixtures) {
    const auto nl = load_fixture(name);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      SimConfig sim;
      sim.cycles = 3000;
      sim.rng_seed = seed;
      sim.initial_state = seed == 2 ? InitialState::Random : InitialState::Zero;
      FaultConfig fault{all_ffs(nl), 0.02, seed, {{0, 7}}};
      const auto a = simulate(nl, sim, fault).report;
      const auto b = reference_simulate(nl, sim, fault);
      EXPECT_EQ(a.mismatched_bits, b.mismatched_bits) << name;
      EXPECT_EQ(a.flips_injected, b.flips_injected) << name;
      EXPECT_EQ(a.per_output, b.per_output) << name;
    }
  }
}

TEST(Simulate, CounterMatchesStraightLineModel) {
  const auto nl = load_fixture("counter2");
  SimConfig sim;
  sim.cycles = 1000000;
  const double ours = simulate(nl, sim, {all_ffs(nl), 1e-3, 7, {}}).report.output_bit_mismatch_rate;
  const double theirs = straight_line_counter(1e-3, sim.cycles, 7);
  ASSERT_GT(theirs, 0.0);
  EXPECT_NEAR(ours / theirs, 1.0, 0.2) << ours << " vs " << theirs;
}

TEST(Simulate, RateIsMonotoneInFlipRate) {
  for (const char* name : serial::test::kFixtures) {
    const auto nl = load_fixture(name);
    double prev = -1.0;
    for (double rate : {0.0, 1e-4, 1e-3, 1e-2}) {
      const double m = mean_rate(nl, rate, 20000, 10);
      EXPECT_GE(m, prev) << name << " at " << rate;
      prev = m;
    }
  }
}

TEST(Simulate, LinearAtLowRates) {
  for (const char* name : serial::test::kFixtures) {
    const auto nl = load_fixture(name);
    const double a = mean_rate(nl, 5e-5, 200000, 10);
    const double b = mean_rate(nl, 1e-4, 200000, 10);
    ASSERT_GT(a, 0.0) << name;
    EXPECT_NEAR(b / a, 2.0, 0.6) << name;
  }
}

TEST(Simulate, SameSeedSameResult) {
  const auto nl = load_fixture("s27");
  SimConfig sim;
  sim.cycles = 5000;
  sim.rng_seed = 42;
  const auto a = simulate(nl, sim, {all_ffs(nl), 0.01, 42, {}}).report;
  const auto b = simulate(nl, sim, {all_ffs(nl), 0.01, 42, {}}).report;
  EXPECT_EQ(a.mismatched_bits, b.mismatched_bits);
  EXPECT_EQ(a.flips_injected, b.flips_injected);
}

TEST(Simulate, FlipStreamsArePerFlipFlop) {
  // Dropping one victim must not move the flips of the others.
  const auto nl = load_fixture("shift2");
  SimConfig sim;
  sim.cycles = 50000;
  const auto both = simulate(nl, sim, {{0, 1}, 0.01, 3, {}}).report.flips_injected;
  const auto first = simulate(nl, sim, {{0}, 0.01, 3, {}}).report.flips_injected;
  const auto second = simulate(nl, sim, {{1}, 0.01, 3, {}}).report.flips_injected;
  EXPECT_EQ(both, first + second);
}

TEST(Simulate, TraceStimulusIsReplayed) {
  const auto nl = load_fixture("shift2");
  SimConfig sim;
  sim.cycles = 4;
  sim.stimulus = Stimulus::Trace;
  sim.trace = {{1}, {0}, {1}, {1}};
  const auto r = simulate(nl, sim, {}, true);
  // out = FF2 = input delayed by two cycles, starting from zero.
  EXPECT_EQ(r.golden_outputs, (std::vector<std::vector<std::uint8_t>>{{0}, {0}, {1}, {0}}));
  sim.trace.pop_back();
  EXPECT_THROW(simulate(nl, sim), std::invalid_argument);
}

TEST(Simulate, RejectsBadConfig) {
  const auto nl = load_fixture("shift2");
  EXPECT_THROW(simulate(nl, {}, {{0}, 1.5, 1, {}}), std::invalid_argument);
  EXPECT_THROW(simulate(nl, {}, {{7}, 0.1, 1, {}}), std::invalid_argument);
}

TEST(GroupExperiment, GroupsFollowTheRanking) {
  const auto nl = load_fixture("reconvergent");
  const auto graph = build_significance_graph(nl, procedure1_all(nl).df);
  const auto ranking = rank(graph.index(), procedure2(graph, Eigen::VectorXd::Ones(1)).s);
  SimConfig sim;
  sim.cycles = 5000;
  const auto groups = group_experiment(nl, ranking, 2, 1e-3, sim, 3, 2);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0].first_rank, 1u);
  EXPECT_EQ(groups[2].last_rank, 5u);
  EXPECT_EQ(groups[2].flipflops.size(), 1u);
  const auto again = group_experiment(nl, ranking, 2, 1e-3, sim, 3, 1);
  for (std::size_t g = 0; g < groups.size(); ++g) EXPECT_EQ(groups[g].seed_rates, again[g].seed_rates);
}

TEST(Spearman, HandComputedCases) {
  // Reference values from scipy.stats.spearmanr.
  EXPECT_NEAR(rank_correlation({1, 2, 3, 4, 5}, {5, 6, 7, 8, 7}), 0.8207826816681233, 1e-12);
  EXPECT_NEAR(rank_correlation({3, 1, 4, 1, 5}, {9, 2, 6, 5, 3}), 0.20519567041703085, 1e-12);
  EXPECT_DOUBLE_EQ(rank_correlation({1, 2, 3}, {30, 20, 10}), -1.0);
  EXPECT_THROW(rank_correlation({1, 2}, {1, 2}), DegenerateInput);
  EXPECT_THROW(rank_correlation({1, 2, 3}, {4, 4, 4}), DegenerateInput);
  EXPECT_THROW(rank_correlation({1, 2, 3}, {4, 4}), DegenerateInput);
}

TEST(Spearman, CoherenceIsPositiveWhenTopGroupsHurtMost) {
  std::vector<GroupResult> groups(4);
  const double rates[] = {0.4, 0.3, 0.2, 0.1};
  for (std::size_t g = 0; g < 4; ++g) {
    groups[g].group_index = g;
    groups[g].mismatch_rate = rates[g];
  }
  EXPECT_DOUBLE_EQ(significance_coherence(groups), 1.0);
}
