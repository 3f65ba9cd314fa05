#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "rdmatch/keyed.hpp"

namespace rdmatch {

/// One-nearest-neighbour matches of treated rows to control rows on eta_hat,
/// with replacement.
struct MatchResult {
  /// (treated row, control row), in the order the treated rows were given.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  /// Control row -> number of treated rows matched to it.
  std::map<std::size_t, std::size_t> k_counts;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// For every treated entry, the control minimising |eta_t - eta_c|. Ties go
/// to the control with the smaller eta value, then the smaller row index.
/// Sorts the controls once and binary-searches each treated value.
/// Throws EmptyTreatedGroup / EmptyControlGroup on empty input.
MatchResult match_controls(std::span<const KeyedValue> treated, std::span<const KeyedValue> controls);

/// Exhaustive O(n1 * n0) scan with the same tie rule; the reference the
/// fast matcher is checked against.
MatchResult match_controls_brute(std::span<const KeyedValue> treated, std::span<const KeyedValue> controls);

}  // namespace rdmatch
