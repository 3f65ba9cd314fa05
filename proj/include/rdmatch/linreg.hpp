#pragma once

#include <Eigen/Dense>

namespace rdmatch {

/// Relative pivot threshold below which a design is declared rank deficient.
inline constexpr double kRankTol = 1e-10;

struct LinearFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd residuals;  // b - A * coef
  double rank_tol = kRankTol;
};

/// Least squares via column-pivoted Householder QR. No intercept is added;
/// append a column of ones to `a` for one. Throws DimensionMismatch unless
/// rows(a) == size(b) and rows >= cols >= 1, and RankDeficient when the
/// smallest |R_kk| falls below kRankTol * max |R_kk|.
LinearFit ols(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace rdmatch
