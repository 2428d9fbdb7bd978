#ifndef SLV_RNG_HPP
#define SLV_RNG_HPP

#include <cmath>
#include <cstdint>

// Counter-based random number generation. Every draw is a pure function of
// (seed, stream, counter), so ensembles reproduce exactly no matter how work
// is scheduled across threads.

namespace slv {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream,
                                            std::uint64_t counter) {
  return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

// Uniform in (0, 1); never returns 0 or 1.
inline double uniform01(std::uint64_t word) {
  return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two counter words.
inline double counter_gauss(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const double u1 = uniform01(counter_word(seed, stream, 2 * counter));
  const double u2 = uniform01(counter_word(seed, stream, 2 * counter + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643 * u2);
}

// Seed for the i-th member of an ensemble.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(mix64(base) ^ (0xa5a5a5a5deadbeefull + index));
}

// Maps a signed grid index to a unique counter.
inline constexpr std::uint64_t zigzag(std::int64_t k) {
  return k >= 0 ? 2ull * static_cast<std::uint64_t>(k)
                : 2ull * static_cast<std::uint64_t>(-(k + 1)) + 1ull;
}

}  // namespace slv

#endif
