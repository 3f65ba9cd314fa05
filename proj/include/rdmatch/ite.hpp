#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdmatch/att.hpp"

namespace rdmatch {

/// Additive cubic B-spline regression with optional pairwise products.
struct SplineBasisSpec {
  std::vector<int> df_grid{3, 4, 5, 6, 8, 10};
  int degree = 3;
  bool include_eta = false;
  /// Adds x_j * x_k for every pair j < k of raw covariates.
  bool interactions = true;

  /// Throws InvalidArgument unless the grid is nonempty, strictly
  /// increasing and every entry is >= degree.
  void validate() const;
};

/// Knots fixed on a training sample at one df; everything needed to turn
/// covariates into design rows.
struct SplineDesign {
  int df = 3;
  int degree = 3;
  bool interactions = true;
  std::vector<std::vector<double>> knots;  // one clamped knot vector per covariate

  Eigen::Index covariates() const noexcept { return static_cast<Eigen::Index>(knots.size()); }
  /// 1 + d * df + (interactions ? d(d-1)/2 : 0)
  Eigen::Index dimension() const noexcept;
};

Eigen::Index basis_dimension(Eigen::Index covariates, int df, bool interactions);

/// Places knots on `covariates` (m x d) for the given df.
SplineDesign make_design(const Eigen::MatrixXd& covariates, int df, const SplineBasisSpec& spec);

/// Design rows: constant, per covariate the df B-spline columns left after
/// dropping the first basis function, then the pairwise products.
/// Covariates outside the knot range are clamped to the boundary knots.
Eigen::MatrixXd build_basis(const Eigen::MatrixXd& covariates, const SplineDesign& design);

/// make_design + build_basis; throws TooFewRows when m < dimension.
Eigen::MatrixXd build_basis(const Eigen::MatrixXd& covariates, int df, const SplineBasisSpec& spec);

struct IteModel {
  SplineBasisSpec spec;  // df_grid as searched; chosen df lives in design
  SplineDesign design;
  Eigen::VectorXd coef;
  double training_mse = 0.0;
  /// Mean 4-fold validation MSE per df_grid entry (+inf where the fit failed).
  std::vector<double> cv_mse;

  int chosen_df() const noexcept { return design.df; }
  friend bool operator==(const IteModel&, const IteModel&);
};

/// Fits at a fixed df: coef = ols(build_basis(covariates), response).coef.
IteModel fit_spline_fixed(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& response, int df,
                          const SplineBasisSpec& spec);

/// Chooses df from spec.df_grid by 4-fold cross-validation (folds from a
/// shuffle seeded by cv_seed; equal validation MSE goes to the smaller df),
/// then refits on all rows at that df.
IteModel fit_spline_cv(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& response,
                       const SplineBasisSpec& spec, std::uint64_t cv_seed);

/// Training covariates for the treated rows of the matching split: X, plus
/// eta_hat as the last column when include_eta.
Eigen::MatrixXd ite_covariates(const ObservationSet& obs, std::span<const std::size_t> rows,
                               std::span<const double> eta_hat, bool include_eta);

/// Regresses the matched differences (Y_t - X_t.beta) - (Y_c - X_c.beta) of
/// the treated rows in `matches` on their covariates.
IteModel fit_ite(const ObservationSet& obs, const BetaFit& beta, const MatchResult& matches,
                 std::span<const double> eta_hat, const SplineBasisSpec& spec, std::uint64_t cv_seed);

/// Convenience: fit_ite on the pieces of an AttEstimate.
IteModel fit_ite(const ObservationSet& obs, const AttEstimate& est, const SplineBasisSpec& spec,
                 std::uint64_t cv_seed);

/// alpha_hat at (x, eta_hat). Throws ArityMismatch when x has the wrong
/// length or eta_hat presence disagrees with the model.
double predict_ite(const IteModel& model, std::span<const double> x, std::optional<double> eta_hat = {});

/// predict_ite for every row of a covariate matrix laid out as in training.
Eigen::VectorXd predict_rows(const IteModel& model, const Eigen::MatrixXd& covariates);

/// Mean of (alpha_hat - alpha_0)^2 over `rows`; truth(row) supplies alpha_0.
double ite_mse(const IteModel& model, const ObservationSet& obs, std::span<const std::size_t> rows,
               std::span<const double> eta_hat, const std::function<double(std::size_t)>& truth);

/// Treated rows of the matching split, in pair order.
std::vector<std::size_t> treated_rows(const MatchResult& matches);

/// Plain-text model file; doubles use their shortest round-trip form so a
/// save/load cycle is bit-exact.
std::string serialize_model(const IteModel& model);
IteModel deserialize_model(const std::string& text);
void save_model(const std::filesystem::path& path, const IteModel& model);
IteModel load_model(const std::filesystem::path& path);

}  // namespace rdmatch
