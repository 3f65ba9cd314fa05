#include "rdmatch/bootstrap.hpp"

#include <algorithm>
#include <string>

#include "rdmatch/att.hpp"
#include "rdmatch/error.hpp"
#include "rdmatch/parallel.hpp"
#include "rdmatch/seed.hpp"
#include "rdmatch/stats.hpp"

namespace rdmatch {

double scaled_variance(std::span<const double> replicates, std::size_t n) {
  return static_cast<double>(n / 3) * stats::sample_variance(replicates);
}

std::optional<double> bootstrap_replicate(const ObservationSet& obs, std::size_t r, std::uint64_t seed,
                                          bool crossfit) {
  const std::uint64_t rep_seed = derive_seed(seed, Stream::Bootstrap, r);
  const std::size_t n = obs.size();
  Engine rng(derive_seed(rep_seed, Stream::Resample, 0));
  std::vector<std::size_t> rows(n);
  for (auto& row : rows) row = static_cast<std::size_t>(rng() % n);
  const auto sample = obs.subset(rows);
  try {
    if (crossfit) return estimate_att_crossfit(sample, rep_seed).theta_cf;
    return estimate_att(sample, split_three_way(n, rep_seed)).theta_hat;
  } catch (const Error& e) {
    if (category(e.code()) == ErrorCategory::Numeric) return std::nullopt;
    throw;
  }
}

BootstrapResult summarize_replicates(std::vector<double> replicates, std::size_t n, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidLevel, "level must lie in (0, 1)");
  BootstrapResult res;
  res.level = level;
  res.sigma2_hat = scaled_variance(replicates, n);
  std::vector<double> sorted = replicates;
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - level) / 2.0;
  res.ci_low = stats::quantile_sorted(sorted, tail);
  res.ci_high = stats::quantile_sorted(sorted, 1.0 - tail);
  res.replicates = std::move(replicates);
  return res;
}

BootstrapResult bootstrap_att(const ObservationSet& obs, std::size_t b, double level, std::uint64_t seed,
                              bool crossfit, unsigned threads) {
  if (b < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 bootstrap replicates");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidLevel, "level must lie in (0, 1)");

  std::vector<std::optional<double>> slots(b);
  parallel_for(b, [&](std::size_t r) { slots[r] = bootstrap_replicate(obs, r, seed, crossfit); }, threads);

  std::vector<double> ok;
  ok.reserve(b);
  for (const auto& s : slots) {
    if (s) ok.push_back(*s);
  }
  const std::size_t failed = b - ok.size();
  if (static_cast<double>(failed) > kMaxBootstrapFailureRate * static_cast<double>(b) || ok.size() < 2) {
    throw Error(ErrorCode::TooManyFailures,
                std::to_string(failed) + " of " + std::to_string(b) + " bootstrap replicates failed");
  }
  auto res = summarize_replicates(std::move(ok), obs.size(), level);
  res.b_requested = b;
  res.b_failed = failed;
  return res;
}

}  // namespace rdmatch
