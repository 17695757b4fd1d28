#pragma once

#include <cstdint>
#include <string>

namespace tkc {

// splitmix64; the emitted C tests use the same generator so that both
// sides see identical inputs.
inline uint64_t splitmix64(uint64_t& s) {
  uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [-1, 1).
inline double unit_random(uint64_t& s) { return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-52 - 1.0; }

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t tensor_stream(uint64_t seed, const std::string& name) { return seed ^ fnv1a(name); }

}  // namespace tkc
