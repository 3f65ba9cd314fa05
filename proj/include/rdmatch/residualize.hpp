#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rdmatch/observations.hpp"

namespace rdmatch {

/// Score-equation coefficients: Q regressed on Z (no implicit intercept).
struct GammaFit {
  Eigen::VectorXd gamma_hat;
  std::size_t fit_split_size = 0;
};

/// OLS of Q on Z over `rows`. Throws SplitTooSmall when |rows| < dim_z and
/// RankDeficient when Z restricted to `rows` is not of full column rank.
GammaFit fit_gamma(const ObservationSet& obs, std::span<const std::size_t> rows);

/// eta_hat[k] = Q[rows[k]] - Z[rows[k]] . gamma_hat.
std::vector<double> residuals_eta(const GammaFit& fit, const ObservationSet& obs,
                                  std::span<const std::size_t> rows);

}  // namespace rdmatch
