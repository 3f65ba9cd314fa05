#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rdmatch/diff_beta.hpp"
#include "rdmatch/matching.hpp"
#include "rdmatch/observations.hpp"
#include "rdmatch/residualize.hpp"
#include "rdmatch/split.hpp"

namespace rdmatch {

/// One pass of the three-split estimator.
struct AttEstimate {
  double theta_hat = 0.0;
  BetaFit beta;
  GammaFit gamma;
  MatchResult matches;
  std::size_t n_treated_i3 = 0;
  std::size_t n_control_i3 = 0;
  /// Splits in the roles they played: i1 fits gamma, i2 fits beta, i3 matches.
  SplitAssignment splits;
  /// eta_hat per observation row; NaN on the gamma split, whose residuals
  /// are never used.
  std::vector<double> eta_hat;
};

struct CrossfitEstimate {
  double theta_cf = 0.0;
  std::array<AttEstimate, 3> rotations;
};

/// gamma on splits.i1, eta_hat on i2 and i3, beta on the controls of i2,
/// nearest-eta matching inside i3, and theta_hat as the mean matched
/// difference of beta-adjusted outcomes over the treated rows of i3.
/// Failures are rethrown with the split that caused them in the message.
AttEstimate estimate_att(const ObservationSet& obs, const SplitAssignment& splits);

/// Draws one partition from `seed` and runs estimate_att under the three
/// cyclic role rotations; theta_cf is their arithmetic mean.
CrossfitEstimate estimate_att_crossfit(const ObservationSet& obs, std::uint64_t seed, bool shuffle = true);

/// Per matched pair, (Y_t - X_t.beta) - (Y_c - X_c.beta), in pair order.
std::vector<double> matched_differences(const ObservationSet& obs, const Eigen::VectorXd& beta,
                                        const MatchResult& matches);

/// theta_hat recomputed from stored pairs, beta and raw data.
double theta_from_matches(const ObservationSet& obs, const Eigen::VectorXd& beta, const MatchResult& matches);

}  // namespace rdmatch
