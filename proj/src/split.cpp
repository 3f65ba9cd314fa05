#include "rdmatch/split.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "rdmatch/error.hpp"
#include "rdmatch/observations.hpp"
#include "rdmatch/seed.hpp"

namespace rdmatch {

SplitAssignment SplitAssignment::rotated(int rotation) const {
  switch (((rotation % 3) + 3) % 3) {
    case 1: return SplitAssignment{i2, i3, i1, seed};
    case 2: return SplitAssignment{i3, i1, i2, seed};
    default: return *this;
  }
}

SplitAssignment split_three_way(std::size_t n, std::uint64_t seed, bool shuffle) {
  if (n < kMinRows) throw Error(ErrorCode::TooFewRows, "n=" + std::to_string(n) + " (need at least 9)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) {
    Engine rng(derive_seed(seed, Stream::Split, 0));
    // explicit Fisher-Yates; std::shuffle's draw sequence is unspecified
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(order[i], order[j]);
    }
  }
  const std::size_t third = n / 3;
  const auto b = order.begin();
  SplitAssignment s;
  s.i1.assign(b, b + static_cast<std::ptrdiff_t>(third));
  s.i2.assign(b + static_cast<std::ptrdiff_t>(third), b + static_cast<std::ptrdiff_t>(2 * third));
  s.i3.assign(b + static_cast<std::ptrdiff_t>(2 * third), order.end());
  s.seed = seed;
  return s;
}

}  // namespace rdmatch
