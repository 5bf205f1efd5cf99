#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "serial/error.hpp"
#include "serial/netlist.hpp"

namespace serial {

namespace {

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' || c == ']';
  });
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// "KIND(a,b,c)" -> kind, args.
void split_call(std::string_view call, std::size_t line, std::string& kind, std::vector<std::string>& args) {
  auto open = call.find('(');
  if (open == std::string_view::npos || call.back() != ')') throw ParseError(line, "expected KIND(args)");
  kind = std::string(call.substr(0, open));
  auto body = call.substr(open + 1, call.size() - open - 2);
  args.clear();
  if (body.empty()) return;
  std::size_t start = 0;
  while (true) {
    auto comma = body.find(',', start);
    auto arg = body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!valid_name(arg)) throw ParseError(line, "bad net name '" + std::string(arg) + "'");
    args.emplace_back(arg);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
}

}  // namespace

Netlist parse_bench(std::string_view text, const GateLibrary* library) {
  NetlistBuilder builder;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::string kind;
  std::vector<std::string> args;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string line;
    for (char c : raw)
      if (!std::isspace(static_cast<unsigned char>(c))) line.push_back(c);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string::npos) {
      split_call(line, line_no, kind, args);
      auto k = upper(kind);
      if (args.size() != 1) throw ParseError(line_no, k + " takes one name");
      if (k == "INPUT")
        builder.add_input(args[0], line_no);
      else if (k == "OUTPUT")
        builder.add_output(args[0], line_no);
      else
        throw ParseError(line_no, "unknown declaration '" + kind + "'");
      continue;
    }

    std::string lhs = line.substr(0, eq);
    if (!valid_name(lhs)) throw ParseError(line_no, "bad net name '" + lhs + "'");
    split_call(std::string_view(line).substr(eq + 1), line_no, kind, args);
    if (args.empty()) throw ParseError(line_no, "gate '" + lhs + "' has no inputs");
    auto k = upper(kind);
    if (k == "DFF") {
      if (args.size() != 1) throw ParseError(line_no, "DFF takes exactly one input");
      builder.add_dff(lhs, args[0], line_no);
    } else if (auto gk = gate_kind_from_string(k)) {
      builder.add_gate(lhs, *gk, args, line_no);
    } else if (library && library->find(kind)) {
      builder.add_custom_gate(lhs, kind, library->gates().find(kind)->second, args, line_no);
    } else {
      throw ParseError(line_no, "unknown gate kind '" + kind + "'");
    }
  }
  return std::move(builder).build();
}

Netlist parse_bench_file(const std::string& path, const GateLibrary* library) {
  return parse_bench(read_file(path), library);
}

std::string to_bench(const Netlist& nl) {
  std::ostringstream out;
  for (NetId in : nl.inputs()) out << "INPUT(" << nl.net_name(in) << ")\n";
  for (NetId o : nl.outputs()) out << "OUTPUT(" << nl.net_name(o) << ")\n";
  for (const auto& ff : nl.flipflops()) out << ff.name << " = DFF(" << nl.net_name(ff.d) << ")\n";
  for (const auto& g : nl.gates()) {
    out << g.name << " = " << (g.kind == GateKind::Custom ? g.library_name : std::string(to_string(g.kind))) << "(";
    for (std::size_t i = 0; i < g.inputs.size(); ++i) out << (i ? ", " : "") << nl.net_name(g.inputs[i]);
    out << ")\n";
  }
  return out.str();
}

GateLibrary parse_gate_library(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("gate library: ") + e.what());
  }
  if (doc.is_object()) doc = nlohmann::json::array({doc});
  if (!doc.is_array()) throw ParseError(0, "gate library must be an object or an array of objects");

  GateLibrary lib;
  std::size_t index = 0;
  for (const auto& entry : doc) {
    ++index;
    try {
      auto name = entry.at("name").get<std::string>();
      auto inputs = entry.at("inputs").get<int>();
      auto bits = entry.at("truth_table").get<std::string>();
      if (inputs < 1 || inputs > kMaxCustomFanin)
        throw ParseError(index, "gate '" + name + "': inputs must be in [1, 16]");
      if (bits.size() != (std::size_t{1} << inputs))
        throw ParseError(index, "gate '" + name + "': truth_table length must be 2^inputs");
      if (gate_kind_from_string(upper(name)) || upper(name) == "DFF")
        throw ParseError(index, "gate '" + name + "' shadows a built-in kind");
      lib.add(name, TruthTable::from_bitstring(bits));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(index, std::string("gate library entry: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(index, e.what());
    }
  }
  return lib;
}

}  // namespace serial
