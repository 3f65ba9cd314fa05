#include "rdmatch/linreg.hpp"

#include <string>

#include "rdmatch/error.hpp"

namespace rdmatch {

LinearFit ols(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const auto m = a.rows();
  const auto p = a.cols();
  if (p < 1 || m < p || b.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "A is " + std::to_string(m) + "x" + std::to_string(p) +
                                                  ", b has " + std::to_string(b.size()) + " entries");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const auto diag = qr.matrixQR().diagonal().cwiseAbs();
  const double largest = diag.maxCoeff();
  Eigen::Index effective = 0;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (diag(k) > kRankTol * largest) ++effective;
  }
  if (largest == 0.0 || effective < p) {
    throw Error(ErrorCode::RankDeficient, "effective rank " + std::to_string(effective) + " of " +
                                              std::to_string(p) + " columns");
  }
  LinearFit fit;
  fit.coef = qr.solve(b);
  fit.residuals = b - a * fit.coef;
  return fit;
}

}  // namespace rdmatch
