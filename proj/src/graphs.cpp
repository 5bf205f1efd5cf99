#include "serial/graphs.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "serial/error.hpp"
#include "serial/influence.hpp"

namespace serial {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Output:
      return "output";
    case NodeKind::FlipFlop:
      return "ff";
    case NodeKind::Input:
      return "input";
  }
  return "?";
}

namespace {

std::vector<std::uint32_t> sorted_by_name(const Netlist& nl, const std::vector<NetId>& nets) {
  std::vector<std::uint32_t> order(nets.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return nl.net_name(nets[a]) < nl.net_name(nets[b]); });
  return order;
}

}  // namespace

EndpointIndex::EndpointIndex(const Netlist& nl)
    : k_(nl.outputs().size()), n_(nl.flipflops().size()), m_(nl.inputs().size()) {
  names_.reserve(k_ + n_ + m_);
  netlist_pos_.reserve(k_ + n_ + m_);
  output_node_.resize(k_);
  ff_node_.resize(n_);
  input_node_.resize(m_);

  for (auto pos : sorted_by_name(nl, nl.outputs())) {
    output_node_[pos] = static_cast<std::uint32_t>(names_.size());
    names_.push_back(nl.net_name(nl.outputs()[pos]));
    netlist_pos_.push_back(pos);
  }
  std::vector<NetId> qs;
  for (const auto& ff : nl.flipflops()) qs.push_back(ff.q);
  for (auto pos : sorted_by_name(nl, qs)) {
    ff_node_[pos] = static_cast<std::uint32_t>(names_.size());
    names_.push_back(nl.flipflops()[pos].name);
    netlist_pos_.push_back(pos);
  }
  for (auto pos : sorted_by_name(nl, nl.inputs())) {
    input_node_[pos] = static_cast<std::uint32_t>(names_.size());
    names_.push_back(nl.net_name(nl.inputs()[pos]));
    netlist_pos_.push_back(pos);
  }
}

EndpointIndex::EndpointIndex(std::vector<std::string> outputs, std::vector<std::string> flipflops,
                             std::vector<std::string> inputs)
    : k_(outputs.size()), n_(flipflops.size()), m_(inputs.size()) {
  for (auto* block : {&outputs, &flipflops, &inputs})
    for (std::uint32_t i = 0; i < block->size(); ++i) {
      netlist_pos_.push_back(i);
      names_.push_back(std::move((*block)[i]));
    }
  for (std::uint32_t i = 0; i < k_; ++i) output_node_.push_back(i);
  for (std::uint32_t i = 0; i < n_; ++i) ff_node_.push_back(static_cast<std::uint32_t>(k_) + i);
  for (std::uint32_t i = 0; i < m_; ++i) input_node_.push_back(static_cast<std::uint32_t>(k_ + n_) + i);
}

std::optional<std::uint32_t> EndpointIndex::find(NodeKind kind, std::string_view name) const {
  std::size_t begin = 0, end = k_;
  if (kind == NodeKind::FlipFlop) begin = k_, end = k_ + n_;
  if (kind == NodeKind::Input) begin = k_ + n_, end = size();
  for (std::size_t i = begin; i < end; ++i)
    if (names_[i] == name) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

std::optional<std::uint32_t> sink_node_of(const Netlist& nl, const EndpointIndex& index, NetId net) {
  const Driver& d = nl.driver(net);
  if (d.kind == DriverKind::FlipFlop) return index.flipflop_node(d.index);
  if (d.kind == DriverKind::Input) return index.input_node(d.index);
  return std::nullopt;
}

NetId data_net(const Netlist& nl, const EndpointIndex& index, std::uint32_t endpoint) {
  switch (index.kind(endpoint)) {
    case NodeKind::Output:
      return nl.outputs()[index.netlist_index(endpoint)];
    case NodeKind::FlipFlop:
      return nl.flipflops()[index.netlist_index(endpoint)].d;
    case NodeKind::Input:
      break;
  }
  throw std::invalid_argument("input ports have no fan-in cone");
}

std::vector<std::vector<double>> gate_ldf_table(const Netlist& nl) {
  std::vector<std::vector<double>> table;
  table.reserve(nl.gates().size());
  for (const auto& g : nl.gates()) table.push_back(gate_influence(g).ldf);
  return table;
}

LogicGraph build_logic_graph(const Netlist& nl, const EndpointIndex& index,
                             const std::vector<std::vector<double>>& gate_ldf, std::uint32_t endpoint) {
  LogicGraph lg;
  lg.source = endpoint;
  const NetId root = data_net(nl, index, endpoint);

  // Collect the gates and sinks reachable through nonzero-ldf pins.
  std::unordered_map<std::uint32_t, std::uint32_t> gate_local;
  std::vector<std::uint32_t> sinks;
  std::vector<std::uint32_t> stack;
  auto reach = [&](NetId net) {
    if (auto s = sink_node_of(nl, index, net)) {
      sinks.push_back(*s);
    } else {
      auto g = nl.driver(net).index;
      if (gate_local.emplace(g, 0).second) stack.push_back(g);
    }
  };
  reach(root);
  while (!stack.empty()) {
    auto g = stack.back();
    stack.pop_back();
    const auto& gate = nl.gates()[g];
    for (std::size_t pin = 0; pin < gate.inputs.size(); ++pin)
      if (gate_ldf[g][pin] > 0.0) reach(gate.inputs[pin]);
  }
  std::sort(sinks.begin(), sinks.end());
  sinks.erase(std::unique(sinks.begin(), sinks.end()), sinks.end());
  if (sinks.empty()) throw EmptyConeError(index.name(endpoint));

  lg.gates.reserve(gate_local.size());
  for (const auto& [g, _] : gate_local) lg.gates.push_back(g);
  std::sort(lg.gates.begin(), lg.gates.end(),
            [&](auto a, auto b) { return nl.gate_name_rank(a) < nl.gate_name_rank(b); });
  for (std::uint32_t i = 0; i < lg.gates.size(); ++i) gate_local[lg.gates[i]] = 1 + i;
  lg.sinks = std::move(sinks);

  const auto sink_base = static_cast<std::uint32_t>(1 + lg.gates.size());
  auto local_of = [&](NetId net) -> std::uint32_t {
    if (auto s = sink_node_of(nl, index, net)) {
      auto it = std::lower_bound(lg.sinks.begin(), lg.sinks.end(), *s);
      return sink_base + static_cast<std::uint32_t>(it - lg.sinks.begin());
    }
    return gate_local.at(nl.driver(net).index);
  };

  lg.first_arrow.assign(lg.node_count() + 1, 0);
  lg.arrows.push_back({0, local_of(root), 1.0});
  lg.first_arrow[1] = 1;
  for (std::uint32_t i = 0; i < lg.gates.size(); ++i) {
    const auto g = lg.gates[i];
    const auto& gate = nl.gates()[g];
    for (std::size_t pin = 0; pin < gate.inputs.size(); ++pin)
      if (gate_ldf[g][pin] > 0.0) lg.arrows.push_back({1 + i, local_of(gate.inputs[pin]), gate_ldf[g][pin]});
    lg.first_arrow[2 + i] = static_cast<std::uint32_t>(lg.arrows.size());
  }
  for (std::size_t v = 2 + lg.gates.size(); v <= lg.node_count(); ++v)
    lg.first_arrow[v] = static_cast<std::uint32_t>(lg.arrows.size());
  return lg;
}

SignificanceGraph::SignificanceGraph(EndpointIndex index, std::vector<SignificanceArrow> arrows)
    : index_(std::move(index)), arrows_(std::move(arrows)) {
  std::stable_sort(arrows_.begin(), arrows_.end(), [](const auto& a, const auto& b) {
    return a.head != b.head ? a.head < b.head : a.tail < b.tail;
  });
  first_.assign(index_.size() + 1, 0);
  for (const auto& a : arrows_) {
    if (a.head >= index_.size() || a.tail >= index_.size())
      throw std::invalid_argument("significance arrow refers to an unknown node");
    if (index_.kind(a.head) == NodeKind::Input || index_.kind(a.tail) == NodeKind::Output)
      throw std::invalid_argument("significance arrows run from outputs/flip-flops to flip-flops/inputs");
    ++first_[a.head + 1];
  }
  std::partial_sum(first_.begin(), first_.end(), first_.begin());
}

Eigen::SparseMatrix<double> SignificanceGraph::weighted_df() const {
  const auto k = index_.outputs(), n = index_.flipflops(), m = index_.inputs();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(arrows_.size());
  for (const auto& a : arrows_)
    triplets.emplace_back(static_cast<int>(a.tail - k), static_cast<int>(a.head), a.df * a.confidence);
  Eigen::SparseMatrix<double> w(static_cast<Eigen::Index>(n + m), static_cast<Eigen::Index>(k + n));
  w.setFromTriplets(triplets.begin(), triplets.end());
  return w;
}

SignificanceGraph build_significance_graph(const Netlist& nl, const DFMatrix& df,
                                           const std::set<std::string>& clk_reset) {
  EndpointIndex index(nl);
  std::vector<char> hardened(index.size(), 0);
  for (const auto& name : clk_reset) {
    auto node = index.find(NodeKind::Input, name);
    if (!node) throw Error("'" + name + "' is not an input port");
    hardened[*node] = 1;
  }
  const auto k = static_cast<std::uint32_t>(df.outputs);
  std::vector<SignificanceArrow> arrows;
  arrows.reserve(static_cast<std::size_t>(df.df.nonZeros()));
  for (Eigen::Index col = 0; col < df.df.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(df.df, col); it; ++it) {
      if (it.value() == 0.0) continue;
      const auto tail = static_cast<std::uint32_t>(it.row()) + k;
      arrows.push_back({static_cast<std::uint32_t>(col), tail, it.value(), hardened[tail] ? 0.0 : 1.0});
    }
  return SignificanceGraph(std::move(index), std::move(arrows));
}

NetlistStats stats(const Netlist& nl, const SignificanceGraph& graph) {
  NetlistStats s;
  s.gate_count = nl.gates().size();
  s.input_count = nl.inputs().size();
  s.output_count = nl.outputs().size();
  s.flipflop_count = nl.flipflops().size();
  s.node_count = s.input_count + s.output_count + s.flipflop_count;
  const auto heads = s.output_count + s.flipflop_count;
  s.degree_node = heads ? static_cast<double>(graph.arrows().size()) / static_cast<double>(heads) : 0.0;
  s.max_depth = levelize(nl).max_depth;
  return s;
}

}  // namespace serial
