#pragma once

#include <array>
#include <cstdint>

#include "serial/netlist.hpp"

namespace serial {

/// Parameters of a synthetic sequential circuit.
///
/// Every output and flip-flop gets its own fan-in cone of roughly `degree`
/// distinct endpoints (inputs and flip-flop outputs). Cones may reuse gates
/// of earlier cones, which creates fan-out and reconvergence. Loops only
/// ever close through flip-flops.
struct GeneratorSpec {
  std::size_t inputs = 8;
  std::size_t outputs = 4;
  std::size_t flipflops = 16;
  std::size_t gates = 120;
  double degree = 4.0;
  /// Relative weights of AND, NAND, OR, NOR, XOR, XNOR, MUX, NOT.
  std::array<double, 8> kind_mix{1, 1, 1, 1, 1, 1, 0.5, 0.5};
  int max_fanin = 4;
  double reuse_probability = 0.3;
  bool loops = true;
  std::uint64_t seed = 1;
};

/// Deterministic per spec. Throws InfeasibleSpec when fewer gates than
/// outputs are requested, or when there is nothing to feed the cones.
Netlist generate(const GeneratorSpec& spec);

}  // namespace serial
