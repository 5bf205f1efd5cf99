#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace serial {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed netlist or gate-library text.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(std::move(reason)) {}

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

/// The combinational part of a netlist (flip-flops cut) contains a loop.
class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> gates)
      : Error(describe(gates)), gates_(std::move(gates)) {}

  const std::vector<std::string>& gates() const { return gates_; }

 private:
  static std::string describe(const std::vector<std::string>& gates) {
    std::string msg = "combinational cycle through gates:";
    for (const auto& g : gates) msg += " " + g;
    return msg;
  }
  std::vector<std::string> gates_;
};

/// A net is read but never driven.
class DanglingNetError : public Error {
 public:
  explicit DanglingNetError(std::string net)
      : Error("net '" + net + "' is used but has no driver"), net_(std::move(net)) {}

  const std::string& net() const { return net_; }

 private:
  std::string net_;
};

/// An endpoint whose fan-in cone transmits nothing (constant function).
class EmptyConeError : public Error {
 public:
  explicit EmptyConeError(const std::string& endpoint)
      : Error("fan-in cone of '" + endpoint + "' is constant") {}
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

class OracleSkipped : public Error {
 public:
  OracleSkipped(std::size_t size, std::size_t limit)
      : Error("circuit size " + std::to_string(size) + " exceeds oracle limit " + std::to_string(limit)),
        size_(size) {}

  std::size_t size() const { return size_; }

 private:
  std::size_t size_;
};

}  // namespace serial
