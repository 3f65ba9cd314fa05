#include "rdmatch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdmatch::stats {

namespace {

double central_moment(std::span<const double> v, double mu, int order) {
  double s = 0.0;
  for (const double x : v) s += std::pow(x - mu, order);
  return s / static_cast<double>(v.size());
}

}  // namespace

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double s = 0.0;
  for (const double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

double skewness(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  const double m2 = central_moment(v, mu, 2);
  if (m2 == 0.0) return 0.0;
  return central_moment(v, mu, 3) / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  const double m2 = central_moment(v, mu, 2);
  if (m2 == 0.0) return 0.0;
  return central_moment(v, mu, 4) / (m2 * m2) - 3.0;
}

double median(std::span<const double> v) { return quantile(v, 0.5); }

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> v, double p) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, p);
}

double normal_cdf(double x, double variance) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

double ks_distance_normal(std::span<const double> v, double variance) {
  if (v.empty()) return 0.0;
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i], variance);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<HistogramBin> histogram_fd(std::span<const double> v) {
  if (v.empty()) return {};
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));

  std::size_t nbins = 1;
  if (hi > lo && width > 0.0) {
    nbins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    nbins = std::clamp<std::size_t>(nbins, 1, sorted.size());
  }
  const double step = (hi > lo) ? (hi - lo) / static_cast<double>(nbins) : 0.0;

  std::vector<HistogramBin> bins(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    bins[b].left = lo + step * static_cast<double>(b);
    bins[b].right = (b + 1 == nbins) ? hi : lo + step * static_cast<double>(b + 1);
  }
  for (const double x : sorted) {
    std::size_t b = 0;
    if (step > 0.0) b = std::min(nbins - 1, static_cast<std::size_t>((x - lo) / step));
    ++bins[b].count;
  }
  return bins;
}

}  // namespace rdmatch::stats
