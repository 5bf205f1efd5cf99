#pragma once

#include <string>

#include "serial/netlist.hpp"

namespace serial::test {

inline std::string fixture_path(const std::string& name) { return std::string(SERIAL_FIXTURE_DIR) + "/" + name; }

inline Netlist load_fixture(const std::string& name, const GateLibrary* lib = nullptr) {
  return parse_bench_file(fixture_path(name + ".bench"), lib);
}

inline const char* const kFixtures[] = {"shift2", "loop", "reconvergent", "counter2", "s27", "gen_seq"};

}  // namespace serial::test
