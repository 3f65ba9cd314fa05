#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rdmatch {

/// Three disjoint index blocks covering {0..n-1}. The first two hold
/// floor(n/3) rows each, the third the remaining n - 2*floor(n/3).
struct SplitAssignment {
  std::vector<std::size_t> i1;
  std::vector<std::size_t> i2;
  std::vector<std::size_t> i3;
  std::uint64_t seed = 0;

  std::size_t total() const noexcept { return i1.size() + i2.size() + i3.size(); }

  /// Cyclic role rotation: 0 -> (i1,i2,i3), 1 -> (i2,i3,i1), 2 -> (i3,i1,i2).
  SplitAssignment rotated(int rotation) const;
};

/// Slices {0..n-1} into three blocks. With `shuffle` the indices are first
/// permuted by a Fisher-Yates shuffle driven by `seed`; the result is fully
/// determined by (n, seed, shuffle). Throws TooFewRows when n < 9.
SplitAssignment split_three_way(std::size_t n, std::uint64_t seed, bool shuffle = true);

}  // namespace rdmatch
