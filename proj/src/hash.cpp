#include "equiloc/hash.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <vector>

#include "equiloc/error.hpp"

namespace equiloc {

namespace {
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;
}

Fnv1a& Fnv1a::bytes(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < size; ++k) {
    state_ ^= p[k];
    state_ *= kFnvPrime;
  }
  return *this;
}

Fnv1a& Fnv1a::str(std::string_view s) {
  u64(s.size());
  return bytes(s.data(), s.size());
}

// Little-endian byte order regardless of host.
Fnv1a& Fnv1a::u64(std::uint64_t v) {
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  return bytes(b, 8);
}

Fnv1a& Fnv1a::f64(double v) {
  // -0.0 and 0.0 hash alike
  if (v == 0.0) v = 0.0;
  return u64(std::bit_cast<std::uint64_t>(v));
}

Fnv1a& Fnv1a::f64s(std::span<const double> values) {
  u64(values.size());
  for (double v : values) f64(v);
  return *this;
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<char> content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  return Fnv1a().bytes(content.data(), content.size()).value();
}

}  // namespace equiloc
