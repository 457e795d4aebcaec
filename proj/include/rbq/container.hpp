#pragma once

// Shared binary container layout for states, density matrices and Wigner grids:
//   char[4] magic | uint32 N | uint32 M | float64 L | float64 hbar | payload
// All fields little-endian.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace rbq {

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& field, const std::string& detail)
      : std::runtime_error("bad container field '" + field + "': " + detail), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ContainerHeader {
  std::array<char, 4> magic{};
  std::uint32_t axes = 0;
  std::uint32_t points = 0;
  double length = 0.0;
  double hbar = 0.0;
};

void write_header(std::ostream& out, const ContainerHeader& h);
/// Validates magic, axis count, M (power of two >= 8), L and hbar; throws FormatError naming the field.
ContainerHeader read_header(std::istream& in, const std::array<char, 4>& expected_magic);

void write_f64(std::ostream& out, double v);
double read_f64(std::istream& in, const char* field);

}  // namespace rbq
