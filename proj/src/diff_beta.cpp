#include "rdmatch/diff_beta.hpp"

#include <algorithm>
#include <string>

#include "rdmatch/error.hpp"
#include "rdmatch/linreg.hpp"

namespace rdmatch {

std::vector<std::size_t> order_by_eta(std::span<const KeyedValue> controls) {
  if (controls.empty()) throw Error(ErrorCode::EmptyControlGroup, "nothing to order");
  std::vector<KeyedValue> sorted(controls.begin(), controls.end());
  std::sort(sorted.begin(), sorted.end(), keyed_less);
  std::vector<std::size_t> out;
  out.reserve(sorted.size());
  for (const auto& kv : sorted) out.push_back(kv.index);
  return out;
}

FirstDifferences first_differences(std::span<const std::size_t> sorted_rows, const ObservationSet& obs) {
  const auto m = sorted_rows.size();
  if (m < 2) throw Error(ErrorCode::TooFewControls, std::to_string(m) + " control rows, need at least 2");
  for (const auto r : sorted_rows) {
    if (r >= obs.size()) throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(r));
  }
  FirstDifferences d;
  d.dx.resize(static_cast<Eigen::Index>(m - 1), obs.dim_x());
  d.dy.resize(static_cast<Eigen::Index>(m - 1));
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const auto a = static_cast<Eigen::Index>(sorted_rows[k]);
    const auto b = static_cast<Eigen::Index>(sorted_rows[k + 1]);
    const auto row = static_cast<Eigen::Index>(k);
    d.dx.row(row) = obs.x().row(b) - obs.x().row(a);
    d.dy(row) = obs.y()(b) - obs.y()(a);
  }
  return d;
}

BetaFit fit_beta(const ObservationSet& obs, std::span<const std::size_t> rows,
                 std::span<const double> eta_hat) {
  std::vector<KeyedValue> controls;
  for (const auto r : rows) {
    if (r >= obs.size() || r >= eta_hat.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(r));
    }
    if (!obs.treated(r)) controls.push_back({eta_hat[r], r});
  }
  if (controls.empty()) throw Error(ErrorCode::EmptyControlGroup, "no control rows in the beta split");
  const auto dx = static_cast<std::size_t>(obs.dim_x());
  if (controls.size() < dx + 1) {
    throw Error(ErrorCode::TooFewControls, std::to_string(controls.size()) + " control rows for " +
                                               std::to_string(dx) + " outcome covariates");
  }
  BetaFit fit;
  fit.sort_permutation = order_by_eta(controls);
  const auto diffs = first_differences(fit.sort_permutation, obs);
  fit.beta_hat = ols(diffs.dx, diffs.dy).coef;
  fit.n_controls_used = controls.size();
  return fit;
}

}  // namespace rdmatch
