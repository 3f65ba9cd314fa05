#include "rdmatch/bspline.hpp"

#include <algorithm>
#include <string>

#include "rdmatch/error.hpp"
#include "rdmatch/stats.hpp"

namespace rdmatch {

std::vector<double> make_knots(std::span<const double> values, int df, int degree) {
  if (degree < 1 || df < degree) {
    throw Error(ErrorCode::InvalidArgument,
                "df " + std::to_string(df) + " below spline degree " + std::to_string(degree));
  }
  if (values.empty()) throw Error(ErrorCode::TooFewRows, "no covariate values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateCovariate, "covariate column has zero variance");

  const int interior = df - degree;
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(2 * (degree + 1) + interior));
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), lo);
  for (int j = 1; j <= interior; ++j) {
    knots.push_back(stats::quantile_sorted(sorted, static_cast<double>(j) / (interior + 1)));
  }
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), hi);
  return knots;
}

std::size_t bspline_size(std::span<const double> knots, int degree) {
  return knots.size() - static_cast<std::size_t>(degree) - 1;
}

void bspline_basis(double x, std::span<const double> knots, int degree, std::span<double> out) {
  const std::size_t nbasis = bspline_size(knots, degree);
  const auto p = static_cast<std::size_t>(degree);
  std::fill(out.begin(), out.end(), 0.0);

  const double lo = knots[p];
  const double hi = knots[nbasis];
  x = std::clamp(x, lo, hi);

  // knot span s with knots[s] <= x < knots[s+1]; the right boundary belongs
  // to the last nonempty span
  std::size_t s;
  if (x >= hi) {
    s = nbasis - 1;
    while (s > p && knots[s] == knots[s + 1]) --s;
  } else {
    s = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), x) - knots.begin()) - 1;
  }

  // N[j] holds the basis function with index s - p + j
  std::vector<double> n(p + 1, 0.0), left(p + 1, 0.0), right(p + 1, 0.0);
  n[0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    left[j] = x - knots[s + 1 - j];
    right[j] = knots[s + j] - x;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? n[r] / denom : 0.0;
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  for (std::size_t j = 0; j <= p; ++j) out[s - p + j] = n[j];
}

}  // namespace rdmatch
