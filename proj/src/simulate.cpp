#include "rdmatch/simulate.hpp"

#include <fstream>
#include <random>
#include <string>

#include "rdmatch/att.hpp"
#include "rdmatch/error.hpp"
#include "rdmatch/parallel.hpp"
#include "rdmatch/seed.hpp"

namespace rdmatch::sim {

namespace {

constexpr std::size_t kMinOracleSamples = 100'000;
constexpr std::size_t kMinMcReps = 30;

struct Draw {
  double x[4];
  double eta;
  double eps;
};

class DgpSampler {
 public:
  DgpSampler(std::uint64_t seed, double eps_sd) : rng_(seed), eps_(0.0, eps_sd) {}

  Draw next() {
    Draw d{};
    for (double& v : d.x) v = normal_(rng_);
    d.eta = uniform_(rng_);
    d.eps = eps_(rng_);
    return d;
  }

 private:
  Engine rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
  std::normal_distribution<double> eps_;
};

}  // namespace

void DgpConfig::validate() const {
  if (n < kMinRows) throw Error(ErrorCode::TooFewRows, "n=" + std::to_string(n) + " (need at least 9)");
  if (!(eps_sd > 0.0) || !std::isfinite(eps_sd)) throw Error(ErrorCode::InvalidArgument, "eps_sd must be positive");
}

double true_alpha(IteKind kind, double x1, double x2, double x3, double eta) {
  const double base = x1 * x1 + x2 * x3;
  return kind == IteKind::XandEta ? base + eta * eta : base;
}

SimulatedData generate_with_truth(const DgpConfig& config) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(config.n);
  Eigen::VectorXd y(n), q(n);
  Eigen::MatrixXd x(n, 3), z(n, 4);
  std::vector<double> eta(config.n), alpha(config.n);

  DgpSampler sampler(config.seed, config.eps_sd);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Draw d = sampler.next();
    const auto k = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < 4; ++j) z(i, j) = d.x[j];
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = d.x[j];
    q(i) = d.x[3] + d.eta;
    eta[k] = d.eta;

    const bool treated = q(i) >= 0.0;
    const double linear = d.x[0] + d.x[2];
    if (config.noiseless_null) {
      alpha[k] = 0.0;
      y(i) = linear;
      continue;
    }
    alpha[k] = config.constant_alpha ? *config.constant_alpha
                                     : true_alpha(config.ite_kind, d.x[0], d.x[1], d.x[2], d.eta);
    y(i) = (treated ? alpha[k] : 0.0) + linear + d.eta / 2.0 + d.eps;
  }
  return SimulatedData{ObservationSet(std::move(y), std::move(x), std::move(z), std::move(q), 0.0),
                       std::move(eta), std::move(alpha)};
}

ObservationSet generate(const DgpConfig& config) { return generate_with_truth(config).obs; }

OracleEstimate true_att_oracle_detail(std::size_t samples, std::uint64_t seed, const AlphaFn& alpha) {
  if (samples < kMinOracleSamples) {
    throw Error(ErrorCode::InvalidArgument, "oracle needs at least 100000 samples");
  }
  DgpSampler sampler(derive_seed(seed, Stream::Oracle, 0), 1.0);
  double sum = 0.0, sum_sq = 0.0;
  std::size_t accepted = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Draw d = sampler.next();
    if (d.x[3] + d.eta < 0.0) continue;
    const double a = alpha ? alpha(d.x, d.eta) : true_alpha(IteKind::XandEta, d.x[0], d.x[1], d.x[2], d.eta);
    sum += a;
    sum_sq += a * a;
    ++accepted;
  }
  OracleEstimate est;
  est.accepted = accepted;
  if (accepted == 0) return est;
  const double m = static_cast<double>(accepted);
  est.mean = sum / m;
  const double var = accepted > 1 ? std::max(0.0, (sum_sq - m * est.mean * est.mean) / (m - 1.0)) : 0.0;
  est.std_error = std::sqrt(var / m);
  return est;
}

double true_att_oracle(std::size_t samples, std::uint64_t seed) {
  return true_att_oracle_detail(samples, seed).mean;
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t k) {
  return derive_seed(master_seed, Stream::MonteCarlo, k);
}

McReport summarize_zetas(std::vector<double> zetas, double target_variance) {
  McReport r;
  r.target_variance = target_variance;
  r.mean = stats::mean(zetas);
  r.variance = stats::sample_variance(zetas);
  r.skewness = stats::skewness(zetas);
  r.excess_kurtosis = stats::excess_kurtosis(zetas);
  r.ks_stat = stats::ks_distance_normal(zetas, target_variance);
  r.histogram = stats::histogram_fd(zetas);
  r.zetas = std::move(zetas);
  return r;
}

McReport monte_carlo_att(const DgpConfig& config, std::size_t reps, bool crossfit, std::uint64_t master_seed,
                         unsigned threads, const AttEstimator& estimator) {
  if (reps < kMinMcReps) throw Error(ErrorCode::InvalidArgument, "need at least 30 Monte-Carlo replicates");
  config.validate();

  std::vector<double> thetas(reps);
  parallel_for(
      reps,
      [&](std::size_t k) {
        DgpConfig cfg = config;
        cfg.seed = replicate_seed(master_seed, k);
        const auto obs = generate(cfg);
        try {
          if (estimator) {
            thetas[k] = estimator(obs, cfg.seed);
          } else if (crossfit) {
            thetas[k] = estimate_att_crossfit(obs, cfg.seed).theta_cf;
          } else {
            thetas[k] = estimate_att(obs, split_three_way(obs.size(), cfg.seed)).theta_hat;
          }
        } catch (const Error& e) {
          throw e.with_context("Monte-Carlo replicate " + std::to_string(k));
        }
      },
      threads);

  const double scale = std::sqrt(static_cast<double>(crossfit ? config.n : config.n / 3));
  std::vector<double> zetas(reps);
  for (std::size_t k = 0; k < reps; ++k) zetas[k] = scale * (thetas[k] - kTrueAtt);

  auto report = summarize_zetas(std::move(zetas), kReferenceVariance);
  report.n = config.n;
  report.reps = reps;
  report.crossfit = crossfit;
  report.thetas = std::move(thetas);
  return report;
}

std::vector<double> monte_carlo_ite(const DgpConfig& config, const SplineBasisSpec& spec,
                                    std::span<const std::uint64_t> seeds, unsigned threads,
                                    const IteOverride& override_prediction) {
  config.validate();
  spec.validate();
  std::vector<double> mses(seeds.size());
  parallel_for(
      seeds.size(),
      [&](std::size_t k) {
        DgpConfig cfg = config;
        cfg.seed = seeds[k];
        const auto data = generate_with_truth(cfg);
        try {
          const auto est = estimate_att(data.obs, split_three_way(data.obs.size(), cfg.seed));
          const auto rows = treated_rows(est.matches);
          if (override_prediction) {
            double s = 0.0;
            for (const auto r : rows) {
              const double e = override_prediction(data, r) - data.alpha[r];
              s += e * e;
            }
            mses[k] = rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
            return;
          }
          const auto model = fit_ite(data.obs, est, spec, cfg.seed);
          mses[k] = ite_mse(model, data.obs, rows, est.eta_hat, [&](std::size_t r) { return data.alpha[r]; });
        } catch (const Error& e) {
          throw e.with_context("ITE replicate " + std::to_string(k));
        }
      },
      threads);
  return mses;
}

nlohmann::json to_json(const McReport& report) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& b : report.histogram) {
    hist.push_back({{"bin_left", b.left}, {"bin_right", b.right}, {"count", b.count}});
  }
  return {
      {"n", report.n},
      {"reps", report.reps},
      {"crossfit", report.crossfit},
      {"theta0", report.theta0},
      {"target_variance", report.target_variance},
      {"zetas", report.zetas},
      {"mean", report.mean},
      {"variance", report.variance},
      {"skewness", report.skewness},
      {"excess_kurtosis", report.excess_kurtosis},
      {"ks_stat", report.ks_stat},
      {"histogram", hist},
  };
}

void write_histogram_csv(const std::filesystem::path& path, std::span<const stats::HistogramBin> bins) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << "bin_left,bin_right,count\n";
  for (const auto& b : bins) out << format_double(b.left) << ',' << format_double(b.right) << ',' << b.count << '\n';
}

void write_dgp_csv(const std::filesystem::path& path, const ObservationSet& obs) {
  if (obs.dim_z() != 4) throw Error(ErrorCode::DimensionMismatch, "expected the four simulated covariates in Z");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << "y,x1,x2,x3,x4,q\n";
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(obs.size()); ++i) {
    out << format_double(obs.y()(i));
    for (Eigen::Index j = 0; j < 4; ++j) out << ',' << format_double(obs.z()(i, j));
    out << ',' << format_double(obs.q()(i)) << '\n';
  }
}

ColumnSpec dgp_columns() {
  return ColumnSpec{"y", "q", {"x1", "x2", "x3"}, {"x1", "x2", "x3", "x4"}, 0.0};
}

}  // namespace rdmatch::sim
