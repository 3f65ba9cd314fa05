#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "rdmatch/ite.hpp"
#include "rdmatch/observations.hpp"
#include "rdmatch/stats.hpp"

namespace rdmatch::sim {

// Synthetic design:
//   X1..X4 ~ N(0,1) iid, eta ~ U(-1,1), eps ~ N(0, eps_sd^2)
//   Q = X4 + eta,  treated iff Q >= 0
//   Y = alpha0 * 1{Q >= 0} + X1 + X3 + eta/2 + eps
// with Z = (X1..X4), X = (X1..X3), gamma0 = (0,0,0,1), beta0 = (1,0,1).

/// E[X1^2 + X2 X3 + eta^2 | X4 + eta >= 0]; the sign flip (X4, eta) -> (-X4, -eta)
/// leaves the integrand unchanged, so the conditioning drops out: 1 + 0 + 1/3.
inline constexpr double kTrueAtt = 4.0 / 3.0;
/// Reference asymptotic variance of sqrt(n/3) (theta_hat - theta0) for this design.
inline constexpr double kReferenceVariance = 11.455;

enum class IteKind {
  XOnly,    // alpha0 = X1^2 + X2 X3
  XandEta,  // alpha0 = X1^2 + X2 X3 + eta^2
};

struct DgpConfig {
  std::size_t n = 12'000;
  std::uint64_t seed = 0;
  IteKind ite_kind = IteKind::XandEta;
  /// The outcome noise is N(0, 0.5) read as variance 0.5.
  double eps_sd = std::sqrt(0.5);
  /// Test hook: a constant treatment effect in place of alpha0.
  std::optional<double> constant_alpha;
  /// alpha0 = 0, ell = 0, eps = 0, so Y = X . beta0 exactly.
  bool noiseless_null = false;

  void validate() const;
};

double true_alpha(IteKind kind, double x1, double x2, double x3, double eta);

struct SimulatedData {
  ObservationSet obs;
  std::vector<double> eta;    // true score residual per row
  std::vector<double> alpha;  // true individual effect per row
};

SimulatedData generate_with_truth(const DgpConfig& config);
ObservationSet generate(const DgpConfig& config);

using AlphaFn = std::function<double(std::span<const double> x, double eta)>;

struct OracleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t accepted = 0;
};

/// Monte-Carlo mean of alpha0 over draws with X4 + eta >= 0. `alpha`
/// overrides alpha0 (x holds X1..X4). Throws InvalidArgument below 1e5 samples.
OracleEstimate true_att_oracle_detail(std::size_t samples, std::uint64_t seed, const AlphaFn& alpha = {});
double true_att_oracle(std::size_t samples, std::uint64_t seed);

struct McReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  bool crossfit = false;
  double theta0 = kTrueAtt;
  double target_variance = kReferenceVariance;
  std::vector<double> thetas;
  std::vector<double> zetas;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_stat = 0.0;
  std::vector<stats::HistogramBin> histogram;
};

/// Replaces the estimator in monte_carlo_att; returns theta for one dataset.
using AttEstimator = std::function<double(const ObservationSet& obs, std::uint64_t seed)>;

/// Seed used for the dataset of Monte-Carlo replicate k.
std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t k);

/// For each replicate k: a fresh dataset with replicate_seed(master, k),
/// theta_hat (cross-fitted when asked), and
/// zeta_k = sqrt(m) (theta_hat - 4/3) with m = floor(n/3), or m = n when
/// cross-fitted. Throws InvalidArgument for reps < 30.
McReport monte_carlo_att(const DgpConfig& config, std::size_t reps, bool crossfit, std::uint64_t master_seed,
                         unsigned threads = 0, const AttEstimator& estimator = {});

McReport summarize_zetas(std::vector<double> zetas, double target_variance);

/// Test hook for monte_carlo_ite: prediction for a row in place of the model.
using IteOverride = std::function<double(const SimulatedData& data, std::size_t row)>;

/// Per seed: generate with that seed, run the estimator up to matching on a
/// split from the same seed, fit the spline ITE model, and return the
/// treated-set MSE against the true alpha0.
std::vector<double> monte_carlo_ite(const DgpConfig& config, const SplineBasisSpec& spec,
                                    std::span<const std::uint64_t> seeds, unsigned threads = 0,
                                    const IteOverride& override_prediction = {});

nlohmann::json to_json(const McReport& report);
void write_histogram_csv(const std::filesystem::path& path, std::span<const stats::HistogramBin> bins);

/// Writes a simulated sample with header y,x1,x2,x3,x4,q.
void write_dgp_csv(const std::filesystem::path& path, const ObservationSet& obs);
/// Columns of a write_dgp_csv file: y, q, X = x1..x3, Z = x1..x4, tau0 = 0.
ColumnSpec dgp_columns();

}  // namespace rdmatch::sim
