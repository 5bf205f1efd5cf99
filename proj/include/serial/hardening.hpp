#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "serial/faultsim.hpp"

namespace serial {

enum class HardeningPolicy : std::uint8_t { SerialTop, Random };

std::string_view to_string(HardeningPolicy policy);

struct HardeningPlan {
  std::vector<std::uint32_t> protected_ffs;  // netlist flip-flop indices, sorted
  double coverage = 0.0;
  HardeningPolicy policy = HardeningPolicy::SerialTop;
  std::uint64_t seed = 0;  // Random only
};

/// Protects round(coverage * #FF) flip-flops: the top of the ranking, or a
/// uniform draw for the random policy. Inputs are never candidates.
HardeningPlan select(const EndpointIndex& index, const Ranking& ranking, double coverage, HardeningPolicy policy,
                     std::uint64_t seed = 0);

struct HardeningEvaluation {
  double coverage = 0.0;
  double flip_rate = 0.0;
  double mean_rate = 0.0;
  double stddev = 0.0;         // sample standard deviation over seeds
  double area_overhead = 0.0;  // extra area in units of the total FF area; a hardened FF costs one more FF
  std::vector<double> seed_rates;
};

/// Every unprotected flip-flop flips at `flip_rate`; protected ones never do.
/// Seed s simulates with sim.rng_seed + s.
HardeningEvaluation evaluate(const Netlist& netlist, const HardeningPlan& plan, double flip_rate,
                             const SimConfig& sim, unsigned seeds, unsigned threads = 1);

struct SweepRow {
  HardeningPolicy policy;
  double coverage;
  double flip_rate;
  double mean_rate;
  double stddev;
  double area_overhead;
};

/// Cross product of coverages and flip rates. The random policy draws a
/// fresh plan for every (coverage, seed) cell, seeded with sim.rng_seed + s
/// and the coverage position, so plans never nest by construction.
std::vector<SweepRow> sweep(const Netlist& netlist, const Ranking& ranking, const std::vector<double>& coverages,
                            const std::vector<double>& flip_rates, HardeningPolicy policy, const SimConfig& sim,
                            unsigned seeds, unsigned threads = 1);

}  // namespace serial
