#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace psum {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// 64-bit FNV-1a. Pass a previous result as `state` to hash incrementally.
constexpr std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                                std::uint64_t state = kFnvOffsetBasis) {
  for (std::uint8_t b : bytes) {
    state ^= b;
    state *= kFnvPrime;
  }
  return state;
}

constexpr std::uint64_t fnv1a64(std::string_view text,
                                std::uint64_t state = kFnvOffsetBasis) {
  for (char c : text) {
    state ^= static_cast<std::uint8_t>(c);
    state *= kFnvPrime;
  }
  return state;
}

}  // namespace psum
