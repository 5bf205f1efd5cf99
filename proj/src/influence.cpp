#include "serial/influence.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace serial {

InfluenceVector influence(const TruthTable& table) {
  const int n = table.fanin();
  const std::size_t rows = table.rows();
  std::vector<std::uint64_t> count(static_cast<std::size_t>(n), 0);
  for (std::size_t r = 0; r < rows; ++r)
    for (int i = 0; i < n; ++i)
      if (table[r] != table[r ^ table.pin_mask(i)]) ++count[i];

  const std::uint64_t total = std::accumulate(count.begin(), count.end(), std::uint64_t{0});
  InfluenceVector iv;
  iv.raw.resize(count.size());
  iv.ldf.assign(count.size(), 0.0);
  for (std::size_t i = 0; i < count.size(); ++i) {
    iv.raw[i] = static_cast<double>(count[i]) / static_cast<double>(rows);
    // count/total is a single correctly rounded division of integers, so
    // equal counts give exactly 1.0/n.
    if (total) iv.ldf[i] = static_cast<double>(count[i]) / static_cast<double>(total);
  }
  return iv;
}

std::vector<double> symmetric_ldf(int fanin) {
  if (fanin < 1) throw std::invalid_argument("symmetric_ldf: fan-in must be >= 1");
  return std::vector<double>(static_cast<std::size_t>(fanin), 1.0 / fanin);
}

InfluenceVector influence_symmetric(GateKind kind, int fanin) {
  if (!is_symmetric(kind)) throw std::invalid_argument("influence_symmetric: kind is not symmetric");
  InfluenceVector iv;
  iv.ldf = symmetric_ldf(fanin);
  double raw = 1.0;
  if (kind == GateKind::And || kind == GateKind::Nand || kind == GateKind::Or || kind == GateKind::Nor)
    raw = std::ldexp(1.0, 1 - fanin);
  iv.raw.assign(static_cast<std::size_t>(fanin), raw);
  return iv;
}

InfluenceVector gate_influence(const Gate& gate) {
  const int n = static_cast<int>(gate.inputs.size());
  if (gate.kind == GateKind::Custom) return influence(*gate.table);
  if (is_symmetric(gate.kind)) return influence_symmetric(gate.kind, n);
  return influence(TruthTable::of(gate.kind, n));
}

}  // namespace serial
