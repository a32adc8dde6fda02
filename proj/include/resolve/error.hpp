#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace resolve {

// Two polynomials from different variable registries met in one operation.
struct RegistryMismatch : std::logic_error {
  using std::logic_error::logic_error;
};

struct UnknownVariable : std::invalid_argument {
  explicit UnknownVariable(const std::string& name)
      : std::invalid_argument("unknown variable '" + name + "'"), name(name) {}
  std::string name;
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t pos, std::string expected, const std::string& input)
      : std::runtime_error("parse error at position " + std::to_string(pos) +
                           ": expected " + expected + " in \"" + input + "\""),
        position(pos),
        expected(std::move(expected)) {}
  std::size_t position;
  std::string expected;
};

struct NotSquare : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a Groebner computation exceeds its S-pair or degree budget.
// Callers translate this into an "inconclusive" verdict.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (chart files, tables, centers).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace resolve
