#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace equiloc {

// 64-bit FNV-1a accumulator. Used for instance fingerprints and manifest
// hashes, so the byte layout fed to it must stay stable across releases.
class Fnv1a {
 public:
  Fnv1a& bytes(const void* data, std::size_t size);
  Fnv1a& str(std::string_view s);
  Fnv1a& u64(std::uint64_t v);
  Fnv1a& f64(double v);
  Fnv1a& f64s(std::span<const double> values);

  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 14695981039346656037ULL;
};

std::string to_hex(std::uint64_t v);
std::uint64_t hash_file(const std::string& path);

}  // namespace equiloc
