#pragma once

#include <cstdint>

namespace multihaz {

/// Purpose tag for a random draw. Each (seed, subject, time, purpose)
/// tuple addresses its own independent uniform variate, so generation
/// is reproducible regardless of evaluation order or parallel schedule.
enum class Draw : std::uint64_t {
  stratum = 1,
  frailty = 2,
  assignment = 3,
  event = 4,
  redeath = 5,
  censor = 6,
};

namespace detail {

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

/// 64-bit hash of a keyed draw address.
inline constexpr std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t subject,
                                          std::uint64_t time_index, Draw purpose) {
  std::uint64_t h = detail::mix64(seed + detail::kGolden);
  h = detail::mix64(h ^ (subject + detail::kGolden));
  h = detail::mix64(h ^ (time_index + detail::kGolden));
  h = detail::mix64(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

/// Uniform variate in [0, 1) for a keyed draw address.
inline constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t subject,
                                      std::uint64_t time_index, Draw purpose) {
  return static_cast<double>(keyed_bits(seed, subject, time_index, purpose) >> 11) *
         0x1.0p-53;
}

}  // namespace multihaz
