#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "serial/faultsim.hpp"
#include "serial/graphs.hpp"
#include "serial/propagation.hpp"

namespace serial {

/// df of one endpoint as the sum over every gate path of the product of
/// pin ldf values, with the ldf taken from truth-table enumeration.
/// Throws OracleSkipped when the cone holds more than `gate_limit` gates.
std::vector<std::pair<std::uint32_t, double>> path_enumeration_df(const Netlist& netlist, const EndpointIndex& index,
                                                                 std::uint32_t endpoint, std::size_t gate_limit = 20);

/// Number of gates in the fan-in cone of an endpoint (all pins followed).
std::size_t cone_gate_count(const Netlist& netlist, const EndpointIndex& index, std::uint32_t endpoint);

/// Second simulator: evaluates each net on demand by recursion from the
/// sampled nets instead of a compiled gate list. Shares the stimulus and
/// flip streams with simulate(), so both must agree bit for bit.
MismatchReport reference_simulate(const Netlist& netlist, const SimConfig& sim, const FaultConfig& fault = {});

/// Relative deviation max|a - b| / max|b|; 0 when both are zero.
double relative_deviation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct OracleLimits {
  std::size_t max_cone_gates = 20;
  std::size_t max_linear_nodes = 5000;  // n + m
  std::size_t max_sim_gates = 20000;
  std::uint64_t sim_cycles = 2000;
  double sim_flip_rate = 0.01;
  double p2_eps = 1e-10;
  int p2_max_iters = 100000;
};

struct OracleOutcome {
  std::string name;
  bool skipped = false;
  bool passed = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct OracleReport {
  std::vector<OracleOutcome> outcomes;
  bool all_passed() const;
};

/// Runs path enumeration vs. procedure1, direct_solve vs. procedure2 and the
/// second simulator vs. simulate(). Throws OracleSkipped when the circuit
/// exceeds the linear-system limit.
OracleReport oracle_check(const Netlist& netlist, const OracleLimits& limits = {}, unsigned threads = 1);

}  // namespace serial
