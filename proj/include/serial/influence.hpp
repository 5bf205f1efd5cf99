#pragma once

#include <vector>

#include "serial/netlist.hpp"
#include "serial/truth_table.hpp"

namespace serial {

/// Per-input Boolean influence of a gate.
///
/// `raw[i]` is the fraction of the 2^n input assignments at which toggling
/// input i toggles the output (both directions of a flip pair are counted).
/// `ldf` normalizes `raw` to sum to one; a constant gate has an all-zero
/// `ldf` and distributes nothing.
struct InfluenceVector {
  std::vector<double> raw;
  std::vector<double> ldf;
};

/// Exhaustive enumeration over the truth table.
InfluenceVector influence(const TruthTable& table);

/// Closed form for the symmetric built-ins: ldf = 1/n for every input.
/// `raw` follows the kind (2/2^n for the AND/OR family, 1 for XOR/XNOR/NOT/BUF).
InfluenceVector influence_symmetric(GateKind kind, int fanin);

/// ldf-only closed form, independent of gate kind.
std::vector<double> symmetric_ldf(int fanin);

/// Influence of a netlist gate: closed form for symmetric built-ins,
/// enumeration for MUX and custom gates.
InfluenceVector gate_influence(const Gate& gate);

}  // namespace serial
