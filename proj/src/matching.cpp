#include "rdmatch/matching.hpp"

#include <algorithm>
#include <cmath>

#include "rdmatch/error.hpp"

namespace rdmatch {

namespace {

void check_nonempty(std::span<const KeyedValue> treated, std::span<const KeyedValue> controls) {
  if (treated.empty()) throw Error(ErrorCode::EmptyTreatedGroup, "no treated observations to match");
  if (controls.empty()) throw Error(ErrorCode::EmptyControlGroup, "no control observations to match against");
}

// true when candidate c beats the incumbent best for treated value t
bool better(double t, const KeyedValue& c, const KeyedValue& best) {
  const double dc = std::fabs(t - c.value);
  const double db = std::fabs(t - best.value);
  if (dc != db) return dc < db;
  return keyed_less(c, best);
}

MatchResult with_counts(std::vector<std::pair<std::size_t, std::size_t>> pairs) {
  MatchResult out;
  for (const auto& [t, c] : pairs) ++out.k_counts[c];
  out.pairs = std::move(pairs);
  return out;
}

}  // namespace

MatchResult match_controls(std::span<const KeyedValue> treated, std::span<const KeyedValue> controls) {
  check_nonempty(treated, controls);
  std::vector<KeyedValue> sorted(controls.begin(), controls.end());
  std::sort(sorted.begin(), sorted.end(), keyed_less);
  const auto n0 = sorted.size();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(treated.size());
  for (const auto& tr : treated) {
    const double t = tr.value;
    // first control with value >= t; within equal values it has the smallest index
    const auto hi = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), t,
                         [](const KeyedValue& c, double v) { return c.value < v; }) -
        sorted.begin());

    std::size_t best = n0;
    if (hi > 0) {
      // Walk left across every control whose rounded distance equals the
      // nearest one; the leftmost wins the tie on smaller eta (then index).
      std::size_t lo = hi - 1;
      const double d = std::fabs(t - sorted[lo].value);
      while (lo > 0 && std::fabs(t - sorted[lo - 1].value) == d) --lo;
      best = lo;
    }
    if (hi < n0 && (best == n0 || better(t, sorted[hi], sorted[best]))) best = hi;
    pairs.emplace_back(tr.index, sorted[best].index);
  }
  return with_counts(std::move(pairs));
}

MatchResult match_controls_brute(std::span<const KeyedValue> treated, std::span<const KeyedValue> controls) {
  check_nonempty(treated, controls);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(treated.size());
  for (const auto& tr : treated) {
    const KeyedValue* best = &controls.front();
    for (const auto& c : controls) {
      if (better(tr.value, c, *best)) best = &c;
    }
    pairs.emplace_back(tr.index, best->index);
  }
  return with_counts(std::move(pairs));
}

}  // namespace rdmatch
