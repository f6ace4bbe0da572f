#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace adstitch {

// FNV-1a, 64-bit. The pinned feature/id hash: platform-independent and
// stable across releases, so hashed feature spaces and asset ids never move.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

}  // namespace adstitch
