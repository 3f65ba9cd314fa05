#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rdmatch/keyed.hpp"
#include "rdmatch/observations.hpp"

namespace rdmatch {

/// Outcome-equation slope estimated from eta-ordered first differences of the
/// control rows in the beta split.
struct BetaFit {
  Eigen::VectorXd beta_hat;
  std::size_t n_controls_used = 0;
  /// Control rows of the split, ascending in eta_hat.
  std::vector<std::size_t> sort_permutation;
};

struct FirstDifferences {
  Eigen::MatrixXd dx;  // (m-1) x dX
  Eigen::VectorXd dy;  // m-1
};

/// Row indices sorted ascending by value; equal values keep the smaller index
/// first. Throws EmptyControlGroup on empty input.
std::vector<std::size_t> order_by_eta(std::span<const KeyedValue> controls);

/// Row k holds X[sorted[k+1]] - X[sorted[k]] (likewise for Y).
/// Throws TooFewControls when fewer than two rows are given.
FirstDifferences first_differences(std::span<const std::size_t> sorted_rows, const ObservationSet& obs);

/// Regresses the differenced outcome on the differenced covariates (no
/// intercept) over the control rows of `rows`. `eta_hat` is indexed by
/// observation row. Treated rows of the split are ignored.
BetaFit fit_beta(const ObservationSet& obs, std::span<const std::size_t> rows,
                 std::span<const double> eta_hat);

}  // namespace rdmatch
