#pragma once

#include <cstdint>
#include <random>

namespace fracdim {

// Independent generator for task `index` of a seeded job. Streams depend only on
// (seed, index), so results do not change with the worker count.
inline std::mt19937_64 task_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

// Uniform on the open interval (0, 1).
inline double open_uniform(std::mt19937_64& gen) {
  for (;;) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

}  // namespace fracdim
