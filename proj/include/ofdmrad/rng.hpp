#pragma once

#include <cmath>
#include <cstdint>

#include "ofdmrad/types.hpp"

namespace ofdmrad {

/// Counter-based deterministic RNG. Every draw is a pure function of
/// (seed, stream, counter), so results do not depend on call order or
/// thread scheduling.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(seed ^ 0x6a09e667f3bcc909ULL) ^ splitmix64(stream) ^ (counter * 0x9e3779b97f4a7c15ULL));
}

/// Uniform in (0, 1]; never returns 0 so log() is safe.
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return (static_cast<double>(mix(seed, stream, counter) >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard complex normal CN(0,1): unit total power, Box-Muller.
inline cd gauss_c(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    double u1 = uniform(seed, stream, 2 * counter);
    double u2 = uniform(seed, stream, 2 * counter + 1);
    double r = std::sqrt(-std::log(u1));  // total power 1 => per-dim sigma = 1/sqrt(2)
    return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

/// Derive an independent sub-seed (e.g. per Monte Carlo trial).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(seed ^ splitmix64(a ^ 0xd1b54a32d192ed03ULL) ^ splitmix64(b ^ 0x8cb92ba72f3d8dd7ULL));
}

} // namespace rng
} // namespace ofdmrad
