#include "rbq/container.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

namespace rbq {
namespace {

template <class T>
void put_le(std::ostream& out, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(v);
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in, const char* field) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError(field, "truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_header(std::ostream& out, const ContainerHeader& h) {
  out.write(h.magic.data(), 4);
  put_le(out, h.axes);
  put_le(out, h.points);
  put_le(out, h.length);
  put_le(out, h.hbar);
}

ContainerHeader read_header(std::istream& in, const std::array<char, 4>& expected_magic) {
  ContainerHeader h;
  if (!in.read(h.magic.data(), 4)) throw FormatError("magic", "truncated");
  if (h.magic != expected_magic) {
    throw FormatError("magic", "expected '" + std::string(expected_magic.data(), 4) + "', got '" +
                                   std::string(h.magic.data(), 4) + "'");
  }
  h.axes = get_le<std::uint32_t>(in, "N");
  if (h.axes == 0 || h.axes > 16) throw FormatError("N", "out of range: " + std::to_string(h.axes));
  h.points = get_le<std::uint32_t>(in, "M");
  if (h.points < 8 || !std::has_single_bit(h.points)) {
    throw FormatError("M", "not a power of two >= 8: " + std::to_string(h.points));
  }
  h.length = get_le<double>(in, "L");
  if (!(h.length > 0.0) || !std::isfinite(h.length)) throw FormatError("L", "must be positive and finite");
  h.hbar = get_le<double>(in, "hbar");
  if (!(h.hbar > 0.0) || !std::isfinite(h.hbar)) throw FormatError("hbar", "must be positive and finite");
  return h;
}

void write_f64(std::ostream& out, double v) { put_le(out, v); }
double read_f64(std::istream& in, const char* field) { return get_le<double>(in, field); }

}  // namespace rbq
