#pragma once

#include <cstdint>
#include <random>

namespace larn {

/// Generator for stream `stream` under master seed `seed`. Distinct streams are
/// decorrelated through std::seed_seq, so work split across threads draws the
/// same numbers regardless of scheduling.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

} // namespace larn
