#include "serial/netlist.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "serial/error.hpp"

namespace serial {

namespace {

struct KindName {
  GateKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {GateKind::And, "AND"}, {GateKind::Nand, "NAND"}, {GateKind::Or, "OR"},   {GateKind::Nor, "NOR"},
    {GateKind::Xor, "XOR"}, {GateKind::Xnor, "XNOR"}, {GateKind::Not, "NOT"}, {GateKind::Buf, "BUF"},
    {GateKind::Mux, "MUX"},
};

}  // namespace

std::string_view to_string(GateKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "CUSTOM";
}

std::optional<GateKind> gate_kind_from_string(std::string_view name) {
  for (const auto& kn : kKindNames)
    if (kn.name == name) return kn.kind;
  if (name == "BUFF") return GateKind::Buf;  // ISCAS spelling
  return std::nullopt;
}

bool is_symmetric(GateKind kind) {
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand:
    case GateKind::Or:
    case GateKind::Nor:
    case GateKind::Xor:
    case GateKind::Xnor:
    case GateKind::Not:
    case GateKind::Buf:
      return true;
    default:
      return false;
  }
}

bool evaluate(GateKind kind, const std::uint8_t* in, std::size_t n) {
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand: {
      bool v = true;
      for (std::size_t i = 0; i < n; ++i) v = v && in[i];
      return kind == GateKind::And ? v : !v;
    }
    case GateKind::Or:
    case GateKind::Nor: {
      bool v = false;
      for (std::size_t i = 0; i < n; ++i) v = v || in[i];
      return kind == GateKind::Or ? v : !v;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      bool v = false;
      for (std::size_t i = 0; i < n; ++i) v = v != (in[i] != 0);
      return kind == GateKind::Xor ? v : !v;
    }
    case GateKind::Not:
      return !in[0];
    case GateKind::Buf:
      return in[0] != 0;
    case GateKind::Mux:
      return in[0] ? in[2] != 0 : in[1] != 0;
    case GateKind::Custom:
      break;
  }
  throw std::logic_error("evaluate: custom gates need a truth table");
}

TruthTable::TruthTable(int fanin, std::vector<std::uint8_t> bits) : fanin_(fanin), bits_(std::move(bits)) {
  if (fanin < 1 || fanin > kMaxCustomFanin)
    throw std::invalid_argument("truth table fan-in must be in [1, " + std::to_string(kMaxCustomFanin) + "]");
  if (bits_.size() != (std::size_t{1} << fanin))
    throw std::invalid_argument("truth table needs 2^n rows");
  for (auto& b : bits_) b = b ? 1 : 0;
}

TruthTable TruthTable::of(GateKind kind, int fanin) {
  if (kind == GateKind::Custom) throw std::invalid_argument("TruthTable::of: custom kind");
  if (fanin < 1 || fanin > kMaxCustomFanin) throw std::invalid_argument("TruthTable::of: bad fan-in");
  const std::size_t rows = std::size_t{1} << fanin;
  std::vector<std::uint8_t> bits(rows);
  std::vector<std::uint8_t> in(static_cast<std::size_t>(fanin));
  for (std::size_t r = 0; r < rows; ++r) {
    for (int p = 0; p < fanin; ++p) in[p] = (r >> (fanin - 1 - p)) & 1u;
    bits[r] = evaluate(kind, in.data(), in.size());
  }
  return TruthTable(fanin, std::move(bits));
}

TruthTable TruthTable::from_bitstring(std::string_view s) {
  int n = 0;
  while ((std::size_t{1} << n) < s.size()) ++n;
  if (s.empty() || (std::size_t{1} << n) != s.size() || n < 1)
    throw std::invalid_argument("truth table length must be 2^n with n >= 1");
  std::vector<std::uint8_t> bits(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("truth table must contain only 0/1");
    bits[i] = s[i] == '1';
  }
  return TruthTable(n, std::move(bits));
}

std::string TruthTable::to_bitstring() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

void GateLibrary::add(std::string name, TruthTable table) {
  gates_[std::move(name)] = std::make_shared<const TruthTable>(std::move(table));
}

const TruthTable* GateLibrary::find(std::string_view name) const {
  auto it = gates_.find(name);
  return it == gates_.end() ? nullptr : it->second.get();
}

NetId Netlist::net(std::string_view name) const {
  auto it = net_index_.find(std::string(name));
  if (it == net_index_.end()) throw std::out_of_range("unknown net '" + std::string(name) + "'");
  return it->second;
}

bool Netlist::has_net(std::string_view name) const { return net_index_.count(std::string(name)) != 0; }

NetId NetlistBuilder::intern(std::string_view name) {
  auto [it, inserted] = nl_.net_index_.try_emplace(std::string(name), static_cast<NetId>(nl_.net_names_.size()));
  if (inserted) {
    nl_.net_names_.emplace_back(name);
    nl_.drivers_.emplace_back();
    first_use_line_.push_back(0);
  }
  return it->second;
}

void NetlistBuilder::claim_driver(NetId net, Driver driver, std::size_t line) {
  if (nl_.drivers_[net].kind != DriverKind::None)
    throw ParseError(line, "net '" + nl_.net_names_[net] + "' has more than one driver");
  nl_.drivers_[net] = driver;
}

void NetlistBuilder::add_input(std::string_view name, std::size_t line) {
  NetId id = intern(name);
  claim_driver(id, {DriverKind::Input, static_cast<std::uint32_t>(nl_.inputs_.size())}, line);
  nl_.inputs_.push_back(id);
}

void NetlistBuilder::add_output(std::string_view name, std::size_t line) {
  NetId id = intern(name);
  if (std::find(nl_.outputs_.begin(), nl_.outputs_.end(), id) != nl_.outputs_.end())
    throw ParseError(line, "output '" + std::string(name) + "' declared twice");
  if (!first_use_line_[id]) first_use_line_[id] = line;
  nl_.outputs_.push_back(id);
}

void NetlistBuilder::add_gate(std::string_view name, GateKind kind, const std::vector<std::string>& inputs,
                              std::size_t line) {
  if (kind == GateKind::Custom) throw ParseError(line, "custom gates need a library type");
  const auto n = inputs.size();
  if (n == 0) throw ParseError(line, "gate '" + std::string(name) + "' has no inputs");
  if ((kind == GateKind::Not || kind == GateKind::Buf) && n != 1)
    throw ParseError(line, std::string(to_string(kind)) + " takes exactly one input");
  if (kind == GateKind::Mux && n != 3) throw ParseError(line, "MUX takes exactly (select, in0, in1)");
  if (n > 30) throw ParseError(line, "gate fan-in above 30 is not supported");

  Gate g{std::string(name), kind, {}, 0, nullptr, {}};
  for (const auto& in : inputs) {
    NetId id = intern(in);
    if (!first_use_line_[id]) first_use_line_[id] = line;
    g.inputs.push_back(id);
  }
  g.output = intern(name);
  claim_driver(g.output, {DriverKind::Gate, static_cast<std::uint32_t>(nl_.gates_.size())}, line);
  nl_.gates_.push_back(std::move(g));
}

void NetlistBuilder::add_custom_gate(std::string_view name, std::string_view type,
                                     std::shared_ptr<const TruthTable> table, const std::vector<std::string>& inputs,
                                     std::size_t line) {
  if (!table) throw ParseError(line, "unknown gate type '" + std::string(type) + "'");
  if (static_cast<int>(inputs.size()) != table->fanin())
    throw ParseError(line, "gate type '" + std::string(type) + "' takes " + std::to_string(table->fanin()) +
                               " inputs, got " + std::to_string(inputs.size()));
  Gate g{std::string(name), GateKind::Custom, {}, 0, std::move(table), std::string(type)};
  for (const auto& in : inputs) {
    NetId id = intern(in);
    if (!first_use_line_[id]) first_use_line_[id] = line;
    g.inputs.push_back(id);
  }
  g.output = intern(name);
  claim_driver(g.output, {DriverKind::Gate, static_cast<std::uint32_t>(nl_.gates_.size())}, line);
  nl_.gates_.push_back(std::move(g));
}

void NetlistBuilder::add_dff(std::string_view name, std::string_view d, std::size_t line) {
  NetId d_id = intern(d);
  if (!first_use_line_[d_id]) first_use_line_[d_id] = line;
  NetId q_id = intern(name);
  claim_driver(q_id, {DriverKind::FlipFlop, static_cast<std::uint32_t>(nl_.flipflops_.size())}, line);
  nl_.flipflops_.push_back({std::string(name), d_id, q_id});
}

namespace {

// Returns one combinational cycle among the gates left over by Kahn's algorithm.
std::vector<std::string> find_cycle(const Netlist& nl, const std::vector<int>& pending) {
  const auto& gates = nl.gates();
  std::vector<int> state(gates.size(), 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::uint32_t> stack;
  for (std::uint32_t start = 0; start < gates.size(); ++start) {
    if (!pending[start] || state[start]) continue;
    // Iterative DFS over gate drivers.
    std::vector<std::pair<std::uint32_t, std::size_t>> frames{{start, 0}};
    state[start] = 1;
    stack.assign(1, start);
    while (!frames.empty()) {
      auto& [g, next] = frames.back();
      if (next == gates[g].inputs.size()) {
        state[g] = 2;
        stack.pop_back();
        frames.pop_back();
        continue;
      }
      const Driver& d = nl.driver(gates[g].inputs[next++]);
      if (d.kind != DriverKind::Gate || !pending[d.index]) continue;
      if (state[d.index] == 1) {
        auto it = std::find(stack.begin(), stack.end(), d.index);
        std::vector<std::string> cycle;
        for (; it != stack.end(); ++it) cycle.push_back(gates[*it].name);
        return cycle;
      }
      if (state[d.index] == 0) {
        state[d.index] = 1;
        stack.push_back(d.index);
        frames.emplace_back(d.index, 0);
      }
    }
  }
  return {};
}

}  // namespace

Netlist NetlistBuilder::build() && {
  Netlist& nl = nl_;
  for (NetId id = 0; id < nl.net_names_.size(); ++id)
    if (nl.drivers_[id].kind == DriverKind::None) throw DanglingNetError(nl.net_names_[id]);

  const auto g_count = nl.gates_.size();
  std::vector<std::vector<std::uint32_t>> consumers(g_count);
  std::vector<int> indegree(g_count, 0);
  for (std::uint32_t g = 0; g < g_count; ++g) {
    for (NetId in : nl.gates_[g].inputs) {
      const Driver& d = nl.drivers_[in];
      if (d.kind == DriverKind::Gate) {
        consumers[d.index].push_back(g);
        ++indegree[g];
      }
    }
  }
  nl.topo_.clear();
  nl.topo_.reserve(g_count);
  for (std::uint32_t g = 0; g < g_count; ++g)
    if (indegree[g] == 0) nl.topo_.push_back(g);
  for (std::size_t head = 0; head < nl.topo_.size(); ++head)
    for (auto c : consumers[nl.topo_[head]])
      if (--indegree[c] == 0) nl.topo_.push_back(c);
  if (nl.topo_.size() != g_count) throw CycleError(find_cycle(nl, indegree));

  std::vector<std::uint32_t> by_name(g_count);
  std::iota(by_name.begin(), by_name.end(), 0u);
  std::sort(by_name.begin(), by_name.end(),
            [&](auto a, auto b) { return nl.gates_[a].name < nl.gates_[b].name; });
  nl.gate_rank_.assign(g_count, 0);
  for (std::uint32_t r = 0; r < g_count; ++r) nl.gate_rank_[by_name[r]] = r;

  std::vector<char> read(nl.net_names_.size(), 0);
  for (const auto& g : nl.gates_)
    for (NetId in : g.inputs) read[in] = 1;
  for (const auto& ff : nl.flipflops_) read[ff.d] = 1;
  for (NetId o : nl.outputs_) read[o] = 1;
  for (NetId id = 0; id < nl.net_names_.size(); ++id)
    if (!read[id]) nl.warnings_.push_back("net '" + nl.net_names_[id] + "' is driven but never read");

  return std::move(nl_);
}

Levelization levelize(const Netlist& netlist) {
  Levelization lv;
  lv.level.assign(netlist.gates().size(), 0);
  for (auto g : netlist.topological_order()) {
    int lvl = 0;
    for (NetId in : netlist.gates()[g].inputs) {
      const Driver& d = netlist.driver(in);
      if (d.kind == DriverKind::Gate) lvl = std::max(lvl, lv.level[d.index]);
    }
    lv.level[g] = lvl + 1;
    lv.max_depth = std::max(lv.max_depth, lvl + 1);
  }
  return lv;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace serial
