#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "serial/truth_table.hpp"

namespace serial {

using NetId = std::uint32_t;

struct Gate {
  std::string name;  // same as the driven net
  GateKind kind;
  std::vector<NetId> inputs;
  NetId output;
  std::shared_ptr<const TruthTable> table;  // set for Custom only
  std::string library_name;                 // Custom gate type name
};

struct FlipFlop {
  std::string name;  // same as the Q net
  NetId d;
  NetId q;
};

enum class DriverKind : std::uint8_t { None, Input, Gate, FlipFlop };

struct Driver {
  DriverKind kind = DriverKind::None;
  std::uint32_t index = 0;
};

/// Custom gate types loaded from a sidecar library file.
class GateLibrary {
 public:
  void add(std::string name, TruthTable table);
  const TruthTable* find(std::string_view name) const;
  bool empty() const { return gates_.empty(); }
  const std::map<std::string, std::shared_ptr<const TruthTable>, std::less<>>& gates() const { return gates_; }

 private:
  std::map<std::string, std::shared_ptr<const TruthTable>, std::less<>> gates_;
};

/// Reads `{"name", "inputs", "truth_table"}` objects (single object or array).
GateLibrary parse_gate_library(std::string_view json_text);

/// Validated, immutable gate-level netlist with D flip-flops.
///
/// Inputs, outputs, gates and flip-flops keep declaration order; lookups by
/// name go through the net table.
class Netlist {
 public:
  const std::vector<NetId>& inputs() const { return inputs_; }
  const std::vector<NetId>& outputs() const { return outputs_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<FlipFlop>& flipflops() const { return flipflops_; }

  std::size_t net_count() const { return net_names_.size(); }
  const std::string& net_name(NetId id) const { return net_names_[id]; }
  NetId net(std::string_view name) const;  // throws std::out_of_range
  bool has_net(std::string_view name) const;
  const Driver& driver(NetId id) const { return drivers_[id]; }

  /// Gates in a topological order (every gate after the gates driving it).
  const std::vector<std::uint32_t>& topological_order() const { return topo_; }
  /// Position of each gate when gates are sorted by name.
  std::uint32_t gate_name_rank(std::uint32_t gate) const { return gate_rank_[gate]; }

  /// Nets that are driven but never read.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  friend class NetlistBuilder;
  Netlist() = default;

  std::vector<std::string> net_names_;
  std::unordered_map<std::string, NetId> net_index_;
  std::vector<Driver> drivers_;
  std::vector<NetId> inputs_;
  std::vector<NetId> outputs_;
  std::vector<Gate> gates_;
  std::vector<FlipFlop> flipflops_;
  std::vector<std::uint32_t> topo_;
  std::vector<std::uint32_t> gate_rank_;
  std::vector<std::string> warnings_;
};

/// Incremental construction; `build()` runs the full validation.
class NetlistBuilder {
 public:
  void add_input(std::string_view name, std::size_t line = 0);
  void add_output(std::string_view name, std::size_t line = 0);
  void add_gate(std::string_view name, GateKind kind, const std::vector<std::string>& inputs, std::size_t line = 0);
  void add_custom_gate(std::string_view name, std::string_view type, std::shared_ptr<const TruthTable> table,
                       const std::vector<std::string>& inputs, std::size_t line = 0);
  void add_dff(std::string_view name, std::string_view d, std::size_t line = 0);

  Netlist build() &&;

 private:
  NetId intern(std::string_view name);
  void claim_driver(NetId net, Driver driver, std::size_t line);

  Netlist nl_;
  std::vector<std::string> flipflop_d_names_;
  std::vector<std::size_t> first_use_line_;
};

struct Levelization {
  std::vector<int> level;  // per gate; gates fed only by inputs/FFs are level 1
  int max_depth = 0;
};

Levelization levelize(const Netlist& netlist);

/// Parses the `.bench` dialect; custom gate names resolve against `library`.
Netlist parse_bench(std::string_view text, const GateLibrary* library = nullptr);
Netlist parse_bench_file(const std::string& path, const GateLibrary* library = nullptr);

/// Inverse of parse_bench. Custom gates are written with their library name.
std::string to_bench(const Netlist& netlist);

std::string read_file(const std::string& path);

}  // namespace serial
