#pragma once

#include <cstdint>
#include <random>

namespace rdmatch {

// All randomness in the library flows from explicit 64-bit seeds. Child
// streams are derived by hashing (parent, stream tag, counter) so that any
// replicate can be recomputed in isolation and the schedule never matters.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream tags keep derived seeds for different purposes apart.
enum class Stream : std::uint64_t {
  Split = 1,
  Bootstrap = 2,
  Resample = 3,
  MonteCarlo = 4,
  CrossValidation = 5,
  Oracle = 6,
};

constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream stream,
                                    std::uint64_t counter) noexcept {
  std::uint64_t h = splitmix64(parent);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return splitmix64(h ^ splitmix64(counter));
}

using Engine = std::mt19937_64;

}  // namespace rdmatch
