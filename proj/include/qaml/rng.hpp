#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace qaml {

// All randomness in this project flows through explicitly seeded SplitMix64
// streams. Streams are derived per task from (seed, tag, indices), never
// shared, so serial and parallel runs consume identical values.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Multiply-shift; bias is < n / 2^64.
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Standard normal, Box-Muller. Consumes two uniforms per call.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    // 1 - u1 is in (0, 1], keeping the log finite.
    return std::sqrt(-2.0 * std::log(1.0 - u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }
};

// 64-bit FNV-1a.
inline uint64_t fnv1a(std::string_view text) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Master-seed fan-out: sub-seed for a named purpose. Adding new tags never
// shifts existing streams.
inline uint64_t seed_for(uint64_t master, std::string_view tag) {
  return mix64(master ^ fnv1a(tag));
}

// Per-task stream derivation, e.g. (seed, generation, individual index).
inline uint64_t seed_for(uint64_t seed, uint64_t a, uint64_t b = 0) {
  return mix64(mix64(seed ^ (a * 0x9e3779b97f4a7c15ULL)) ^
               (b * 0xc2b2ae3d27d4eb4fULL));
}

}  // namespace qaml
