#pragma once

#include <cstdint>
#include <vector>

#include "serial/netlist.hpp"
#include "serial/propagation.hpp"
#include "serial/rng.hpp"

namespace serial {

enum class Stimulus : std::uint8_t { UniformRandom, Trace };
enum class InitialState : std::uint8_t { Zero, Random };

struct SimConfig {
  std::uint64_t cycles = 10000;
  Stimulus stimulus = Stimulus::UniformRandom;
  std::vector<std::vector<std::uint8_t>> trace;  // [cycle][input], netlist input order
  InitialState initial_state = InitialState::Zero;
  std::uint64_t rng_seed = 1;
};

struct ForcedFlip {
  std::uint32_t flipflop;  // netlist flip-flop index
  std::uint64_t cycle;
};

struct FaultConfig {
  std::vector<std::uint32_t> victims;  // netlist flip-flop indices
  double flip_rate = 0.0;              // per victim per cycle
  std::uint64_t rng_seed = 1;
  std::vector<ForcedFlip> forced;
};

struct MismatchReport {
  double output_bit_mismatch_rate = 0.0;
  std::vector<double> per_output;  // netlist output order
  std::uint64_t flips_injected = 0;
  std::uint64_t mismatched_bits = 0;
};

struct SimResult {
  MismatchReport report;
  // Filled only when traces are requested: [cycle][output].
  std::vector<std::vector<std::uint8_t>> golden_outputs;
  std::vector<std::vector<std::uint8_t>> faulty_outputs;
};

/// Input values per cycle, from the seeded input substream or a replayed trace.
class InputStimulus {
 public:
  InputStimulus(const SimConfig& config, std::size_t inputs);
  /// Values for the next cycle, in netlist input order.
  const std::vector<std::uint8_t>& next();

 private:
  const SimConfig& config_;
  Rng rng_;
  std::uint64_t cycle_ = 0;
  std::vector<std::uint8_t> values_;
};

/// Flip-flop values at cycle 0.
std::vector<std::uint8_t> initial_state(const SimConfig& config, std::size_t flipflops);

/// Twin simulation: a golden run and a faulty run share the input stream.
///
/// Cycle c evaluates the logic from the flip-flop values and inputs of c,
/// samples the outputs, then captures D into Q. Flips scheduled for cycle c
/// corrupt the captured Q values before cycle c's logic evaluation, so a
/// flip at cycle c is first visible at the outputs of cycle c.
SimResult simulate(const Netlist& netlist, const SimConfig& sim, const FaultConfig& fault = {},
                   bool record_traces = false);

struct GroupResult {
  std::size_t group_index = 0;
  std::size_t first_rank = 0;  // 1-based positions among ranked flip-flops
  std::size_t last_rank = 0;
  std::vector<std::uint32_t> flipflops;  // netlist indices
  double mismatch_rate = 0.0;            // mean over seeds
  std::vector<double> seed_rates;
  std::uint64_t flips_injected = 0;  // summed over seeds
};

/// Flip-flops of a ranking (inputs skipped) mapped to netlist indices, in rank order.
std::vector<std::uint32_t> ranked_flipflops(const EndpointIndex& index, const Ranking& ranking);

/// Splits the ranked flip-flops into consecutive groups of `group_size`
/// and injects faults into one group at a time. Seed s runs with
/// sim.rng_seed + s for both stimulus and flips.
std::vector<GroupResult> group_experiment(const Netlist& netlist, const Ranking& ranking, std::size_t group_size,
                                          double flip_rate, const SimConfig& sim, unsigned seeds,
                                          unsigned threads = 1);

/// Spearman correlation with average ranks for ties. Throws DegenerateInput
/// for fewer than 3 points or a constant sequence.
double rank_correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Correlation between significance order (first group highest) and the
/// measured mismatch rate of each group.
double significance_coherence(const std::vector<GroupResult>& groups);

}  // namespace serial
