#pragma once

#include <cstdint>
#include <random>

namespace loopqed {

/// Engine for sample `index` of a run seeded with `seed`. Independent of which
/// thread draws the sample, so results do not depend on the worker count.
inline std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t index,
                                     std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace loopqed
