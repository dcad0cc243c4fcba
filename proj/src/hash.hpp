#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace uwbnov {

// 64-bit FNV-1a, hex-encoded; used for config and provenance fingerprints.
inline std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace uwbnov
