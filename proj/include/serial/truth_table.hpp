#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace serial {

enum class GateKind : std::uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buf, Mux, Custom };

inline constexpr int kMaxCustomFanin = 16;

std::string_view to_string(GateKind kind);
std::optional<GateKind> gate_kind_from_string(std::string_view name);

/// True for the built-in kinds whose inputs are interchangeable.
bool is_symmetric(GateKind kind);

/// Output column of a Boolean function of `fanin` inputs.
///
/// Row index is the input assignment read as a binary number with the first
/// gate argument as the most significant bit.
class TruthTable {
 public:
  TruthTable(int fanin, std::vector<std::uint8_t> bits);

  /// Table of a built-in kind. MUX pins are ordered (select, in0, in1).
  static TruthTable of(GateKind kind, int fanin);
  /// Parses "0110"-style bit strings; length must be a power of two.
  static TruthTable from_bitstring(std::string_view bits);

  int fanin() const { return fanin_; }
  std::size_t rows() const { return bits_.size(); }
  bool operator[](std::size_t row) const { return bits_[row] != 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  /// Bit mask that selects pin `pin` within a row index.
  std::uint32_t pin_mask(int pin) const { return 1u << (fanin_ - 1 - pin); }

  std::string to_bitstring() const;

 private:
  int fanin_;
  std::vector<std::uint8_t> bits_;
};

/// Evaluates a built-in gate on packed input values (pin 0 = first argument).
bool evaluate(GateKind kind, const std::uint8_t* inputs, std::size_t n);

}  // namespace serial
