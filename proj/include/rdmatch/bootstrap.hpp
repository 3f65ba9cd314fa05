#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rdmatch/observations.hpp"

namespace rdmatch {

/// Largest tolerated share of structurally failed replicates.
inline constexpr double kMaxBootstrapFailureRate = 0.02;

struct BootstrapResult {
  std::vector<double> replicates;  // successful replicates, in replicate order
  double sigma2_hat = 0.0;         // floor(n/3) * sample variance of replicates
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  std::size_t b_requested = 0;
  std::size_t b_failed = 0;
};

/// floor(n/3) * unbiased sample variance.
double scaled_variance(std::span<const double> replicates, std::size_t n);

/// theta_hat for bootstrap replicate r: n rows drawn with replacement using a
/// seed derived from (seed, r), then a fresh split from the same derived
/// seed and the full estimator (cross-fitted when asked). nullopt when the
/// resample is structurally unusable (no controls in a split, singular
/// design, ...).
std::optional<double> bootstrap_replicate(const ObservationSet& obs, std::size_t r, std::uint64_t seed,
                                          bool crossfit);

/// n-out-of-n bootstrap with a percentile interval. Replicates run in
/// parallel; each depends only on (obs, seed, r), so the result is identical
/// for any thread count. Throws InvalidArgument for b < 2, InvalidLevel for
/// level outside (0, 1), TooManyFailures when more than 2% of replicates fail.
BootstrapResult bootstrap_att(const ObservationSet& obs, std::size_t b, double level, std::uint64_t seed,
                              bool crossfit = false, unsigned threads = 0);

/// Fills sigma2 and the percentile interval from a set of replicate values.
BootstrapResult summarize_replicates(std::vector<double> replicates, std::size_t n, double level);

}  // namespace rdmatch
