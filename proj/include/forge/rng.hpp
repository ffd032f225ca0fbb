#pragma once

#include <cstdint>
#include <random>

namespace forge {

using Rng = std::mt19937_64;

// 53-bit uniform in [0,1); avoids distribution objects so streams are
// bit-identical across standard library implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Independent stream for a work item: fixed mixing of seed and index.
inline Rng task_rng(std::uint64_t seed, std::uint64_t task_index) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (task_index + 1));
  return Rng(s);
}

}  // namespace forge
