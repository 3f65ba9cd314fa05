#include "rdmatch/residualize.hpp"

#include <string>

#include "rdmatch/error.hpp"
#include "rdmatch/linreg.hpp"

namespace rdmatch {

GammaFit fit_gamma(const ObservationSet& obs, std::span<const std::size_t> rows) {
  const auto dz = obs.dim_z();
  if (rows.size() < static_cast<std::size_t>(dz)) {
    throw Error(ErrorCode::SplitTooSmall, std::to_string(rows.size()) + " rows for " +
                                              std::to_string(dz) + " score covariates");
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd z(m, dz);
  Eigen::VectorXd q(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto r = rows[static_cast<std::size_t>(k)];
    if (r >= obs.size()) throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(r));
    z.row(k) = obs.z().row(static_cast<Eigen::Index>(r));
    q(k) = obs.q()(static_cast<Eigen::Index>(r));
  }
  GammaFit fit;
  fit.gamma_hat = ols(z, q).coef;
  fit.fit_split_size = rows.size();
  return fit;
}

std::vector<double> residuals_eta(const GammaFit& fit, const ObservationSet& obs,
                                  std::span<const std::size_t> rows) {
  if (fit.gamma_hat.size() != obs.dim_z()) {
    throw Error(ErrorCode::DimensionMismatch, "gamma has " + std::to_string(fit.gamma_hat.size()) +
                                                  " entries, Z has " + std::to_string(obs.dim_z()) +
                                                  " columns");
  }
  std::vector<double> eta;
  eta.reserve(rows.size());
  for (const auto r : rows) {
    if (r >= obs.size()) throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(r));
    const auto ri = static_cast<Eigen::Index>(r);
    eta.push_back(obs.q()(ri) - obs.z().row(ri).dot(fit.gamma_hat));
  }
  return eta;
}

}  // namespace rdmatch
