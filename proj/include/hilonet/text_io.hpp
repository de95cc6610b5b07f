#pragma once
// Round-trip-exact decimal formatting for the text file formats.
// std::to_chars emits the shortest representation that parses back to
// the identical double, which is what the demo, checkpoint and curve
// formats rely on.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "hilonet/errors.hpp"

namespace hilonet {

inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& what) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError("malformed real in " + what + ": '" + std::string(text) + "'");
  }
  return value;
}

inline std::uint64_t parse_u64(std::string_view text, const std::string& what) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError("malformed integer in " + what + ": '" + std::string(text) + "'");
  }
  return value;
}

// FNV-1a, used for config and input fingerprints.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 1469598103934665603ULL) {
  std::uint64_t h = seed;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace hilonet
