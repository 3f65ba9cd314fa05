#pragma once

#include <cstddef>

namespace rdmatch {

/// A residual value tagged with the observation row it belongs to.
struct KeyedValue {
  double value = 0.0;
  std::size_t index = 0;

  friend bool operator==(const KeyedValue&, const KeyedValue&) = default;
};

/// Ascending by value, ties by ascending index.
inline bool keyed_less(const KeyedValue& a, const KeyedValue& b) noexcept {
  if (a.value != b.value) return a.value < b.value;
  return a.index < b.index;
}

}  // namespace rdmatch
