#include <algorithm>
#include <cmath>
#include <regex>

#include "serial/propagation.hpp"

namespace serial {

Eigen::VectorXd output_weights(const EndpointIndex& index, WeightMode mode) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(index.outputs()));
  if (mode == WeightMode::Uniform) return w;
  static const std::regex bus_bit(R"(.*\[(\d+)\])");
  for (std::uint32_t o = 0; o < index.outputs(); ++o) {
    std::smatch match;
    const auto& name = index.name(o);
    if (std::regex_match(name, match, bus_bit)) w[o] = std::ldexp(1.0, std::stoi(match[1].str()));
  }
  return w;
}

Ranking rank(const EndpointIndex& index, const SignificanceVector& s) {
  Ranking r;
  r.reserve(index.flipflops() + index.inputs());
  for (auto node = static_cast<std::uint32_t>(index.outputs()); node < index.size(); ++node)
    r.push_back({node, index.name(node), index.kind(node), s[node]});
  std::sort(r.begin(), r.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.significance != b.significance) return a.significance > b.significance;
    if (a.name != b.name) return a.name < b.name;
    return a.node < b.node;
  });
  return r;
}

CostEstimate estimate_cost(const NetlistStats& stats, double iter1, double iter2) {
  const auto nodes = static_cast<double>(stats.node_count);
  return {nodes * iter1 * stats.degree_node * stats.degree_node, iter2 * nodes * stats.degree_node};
}

}  // namespace serial
