#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rdmatch::stats {

double mean(std::span<const double> v);
/// Unbiased (n - 1) sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> v);
/// Moment skewness m3 / m2^1.5.
double skewness(std::span<const double> v);
/// m4 / m2^2 - 3.
double excess_kurtosis(std::span<const double> v);
double median(std::span<const double> v);

/// Linear interpolation between order statistics (Hyndman-Fan type 7):
/// h = (n - 1) p, result = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
double quantile_sorted(std::span<const double> sorted, double p);
double quantile(std::span<const double> v, double p);

double normal_cdf(double x, double variance);

/// Kolmogorov-Smirnov distance between the empirical distribution of `v` and
/// N(0, variance).
double ks_distance_normal(std::span<const double> v, double variance);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

/// Equal-width bins with Freedman-Diaconis width 2 IQR n^(-1/3). Falls back
/// to a single bin when the IQR or the range is zero.
std::vector<HistogramBin> histogram_fd(std::span<const double> v);

}  // namespace rdmatch::stats
