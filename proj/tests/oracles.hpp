#pragma once

// Test-only reference computations, deliberately written along different
// lines from the library code they check.

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rdmatch/observations.hpp"

namespace oracle {

/// Textbook recursive Cox-de Boor definition of B_{i,p}(x) on [t_i, t_{i+p+1}),
/// with the last basis function closed on the right boundary.
inline double cox_de_boor(const std::vector<double>& t, std::size_t i, int p, double x) {
  if (p == 0) {
    const bool last_span = t[i + 1] == t.back() && t[i] < t[i + 1];
    if (t[i] <= x && (x < t[i + 1] || (last_span && x == t.back()))) return 1.0;
    return 0.0;
  }
  double left = 0.0, right = 0.0;
  const double d1 = t[i + static_cast<std::size_t>(p)] - t[i];
  const double d2 = t[i + static_cast<std::size_t>(p) + 1] - t[i + 1];
  if (d1 > 0.0) left = (x - t[i]) / d1 * cox_de_boor(t, i, p - 1, x);
  if (d2 > 0.0) right = (t[i + static_cast<std::size_t>(p) + 1] - x) / d2 * cox_de_boor(t, i + 1, p - 1, x);
  return left + right;
}

/// Solves the normal equations A'A c = A'b with an explicit inverse; fine for
/// the tiny well-conditioned systems the tests use.
inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::MatrixXd ata = a.transpose() * a;
  return ata.inverse() * (a.transpose() * b);
}

/// Observation set from plain row vectors.
inline rdmatch::ObservationSet make_obs(const std::vector<double>& y, const std::vector<std::vector<double>>& x,
                                        const std::vector<std::vector<double>>& z, const std::vector<double>& q,
                                        double tau0 = 0.0) {
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::VectorXd yy(n), qq(n);
  Eigen::MatrixXd xx(n, static_cast<Eigen::Index>(x.front().size()));
  Eigen::MatrixXd zz(n, static_cast<Eigen::Index>(z.front().size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    yy(i) = y[k];
    qq(i) = q[k];
    for (Eigen::Index j = 0; j < xx.cols(); ++j) xx(i, j) = x[k][static_cast<std::size_t>(j)];
    for (Eigen::Index j = 0; j < zz.cols(); ++j) zz(i, j) = z[k][static_cast<std::size_t>(j)];
  }
  return rdmatch::ObservationSet(yy, xx, zz, qq, tau0);
}

/// A random well-conditioned m x p matrix: Gaussian entries plus a boosted diagonal.
inline Eigen::MatrixXd random_design(std::mt19937_64& rng, Eigen::Index m, Eigen::Index p) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(m, p);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = nd(rng);
  for (Eigen::Index j = 0; j < p; ++j) a(j, j) += 3.0;
  return a;
}

}  // namespace oracle
