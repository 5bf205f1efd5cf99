#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "serial/netlist.hpp"

namespace serial {

enum class NodeKind : std::uint8_t { Output, FlipFlop, Input };

std::string_view to_string(NodeKind kind);

/// Dense numbering of the significance-graph nodes.
///
/// Outputs occupy [0, k), flip-flops [k, k+n) and inputs [k+n, k+n+m); each
/// block is sorted by name so every traversal and report is reproducible.
class EndpointIndex {
 public:
  EndpointIndex() = default;
  explicit EndpointIndex(const Netlist& netlist);
  /// Nodes taken in the given order (used for hand-built graphs).
  EndpointIndex(std::vector<std::string> outputs, std::vector<std::string> flipflops, std::vector<std::string> inputs);

  std::size_t outputs() const { return k_; }
  std::size_t flipflops() const { return n_; }
  std::size_t inputs() const { return m_; }
  std::size_t size() const { return names_.size(); }

  NodeKind kind(std::uint32_t node) const {
    return node < k_ ? NodeKind::Output : node < k_ + n_ ? NodeKind::FlipFlop : NodeKind::Input;
  }
  const std::string& name(std::uint32_t node) const { return names_[node]; }
  /// Position in the netlist's outputs()/flipflops()/inputs() vector.
  std::uint32_t netlist_index(std::uint32_t node) const { return netlist_pos_[node]; }

  std::uint32_t output_node(std::uint32_t netlist_output) const { return output_node_[netlist_output]; }
  std::uint32_t flipflop_node(std::uint32_t netlist_ff) const { return ff_node_[netlist_ff]; }
  std::uint32_t input_node(std::uint32_t netlist_input) const { return input_node_[netlist_input]; }

  std::optional<std::uint32_t> find(NodeKind kind, std::string_view name) const;

 private:
  std::size_t k_ = 0, n_ = 0, m_ = 0;
  std::vector<std::string> names_;
  std::vector<std::uint32_t> netlist_pos_;
  std::vector<std::uint32_t> output_node_, ff_node_, input_node_;
};

/// Node reached when tracing a net backwards: a gate, or a flip-flop/input sink.
std::optional<std::uint32_t> sink_node_of(const Netlist& netlist, const EndpointIndex& index, NetId net);
/// Net whose value the endpoint samples (output net or flip-flop D net).
NetId data_net(const Netlist& netlist, const EndpointIndex& index, std::uint32_t endpoint);

/// ldf of every netlist gate, computed once per netlist.
std::vector<std::vector<double>> gate_ldf_table(const Netlist& netlist);

/// Reversed fan-in cone of one endpoint.
///
/// Local node 0 is the source endpoint, nodes [1, 1+G) are gates sorted by
/// name, the rest are sinks sorted by endpoint id. Arrows point against the
/// signal flow and are grouped by head.
struct LogicGraph {
  struct Arrow {
    std::uint32_t head;
    std::uint32_t tail;
    double ldf;
  };

  std::uint32_t source = 0;           // endpoint id
  std::vector<std::uint32_t> gates;   // netlist gate indices
  std::vector<std::uint32_t> sinks;   // endpoint ids
  std::vector<Arrow> arrows;
  std::vector<std::uint32_t> first_arrow;  // CSR offsets, size node_count()+1

  std::size_t node_count() const { return 1 + gates.size() + sinks.size(); }
  bool is_gate(std::uint32_t local) const { return local >= 1 && local <= gates.size(); }
  bool is_sink(std::uint32_t local) const { return local > gates.size(); }
  std::uint32_t sink_endpoint(std::uint32_t local) const {
    return sinks[local - 1 - static_cast<std::uint32_t>(gates.size())];
  }
};

/// Throws EmptyConeError when the cone transmits to no sink.
LogicGraph build_logic_graph(const Netlist& netlist, const EndpointIndex& index,
                             const std::vector<std::vector<double>>& gate_ldf, std::uint32_t endpoint);

/// Distribution-factor matrix: rows are tails (flip-flops then inputs,
/// shifted by k), columns are heads (outputs then flip-flops).
struct DFMatrix {
  std::size_t outputs = 0, flipflops = 0, inputs = 0;
  Eigen::SparseMatrix<double> df;  // (n+m) x (k+n), column-major

  double operator()(std::uint32_t head, std::uint32_t tail) const {
    return df.coeff(static_cast<Eigen::Index>(tail - outputs), static_cast<Eigen::Index>(head));
  }
};

struct SignificanceArrow {
  std::uint32_t head;
  std::uint32_t tail;
  double df;
  double confidence;
};

/// Weighted digraph over outputs, flip-flops and inputs, reversed w.r.t.
/// the signal direction. May contain loops through flip-flops.
class SignificanceGraph {
 public:
  SignificanceGraph() = default;
  SignificanceGraph(EndpointIndex index, std::vector<SignificanceArrow> arrows);

  const EndpointIndex& index() const { return index_; }
  const std::vector<SignificanceArrow>& arrows() const { return arrows_; }
  std::size_t node_count() const { return index_.size(); }

  /// Arrows leaving `node`, as a [begin, end) range into arrows().
  std::pair<std::uint32_t, std::uint32_t> out_range(std::uint32_t node) const {
    return {first_[node], first_[node + 1]};
  }

  /// Confidence-weighted DF as a sparse (n+m) x (k+n) matrix.
  Eigen::SparseMatrix<double> weighted_df() const;

 private:
  EndpointIndex index_;
  std::vector<SignificanceArrow> arrows_;
  std::vector<std::uint32_t> first_;
};

/// Arrows come from the DF matrix; arrows into the named inputs get
/// confidence 0, all others 1. Unknown names throw serial::Error.
SignificanceGraph build_significance_graph(const Netlist& netlist, const DFMatrix& df,
                                           const std::set<std::string>& clk_reset = {});

struct NetlistStats {
  std::size_t gate_count = 0;
  std::size_t input_count = 0;
  std::size_t output_count = 0;
  std::size_t flipflop_count = 0;
  std::size_t node_count = 0;  // inputs + outputs + flip-flops
  double degree_node = 0.0;    // arrows per head node (outputs and flip-flops)
  int max_depth = 0;
};

NetlistStats stats(const Netlist& netlist, const SignificanceGraph& graph);

}  // namespace serial
