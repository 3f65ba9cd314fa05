#include "rdmatch/att.hpp"

#include <limits>
#include <string>

#include "rdmatch/error.hpp"

namespace rdmatch {

namespace {

template <typename Fn>
auto labelled(const char* label, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.with_context(label);
  }
}

}  // namespace

std::vector<double> matched_differences(const ObservationSet& obs, const Eigen::VectorXd& beta,
                                        const MatchResult& matches) {
  std::vector<double> out;
  out.reserve(matches.pairs.size());
  for (const auto& [t, c] : matches.pairs) {
    const auto ti = static_cast<Eigen::Index>(t);
    const auto ci = static_cast<Eigen::Index>(c);
    const double adj_t = obs.y()(ti) - obs.x().row(ti).dot(beta);
    const double adj_c = obs.y()(ci) - obs.x().row(ci).dot(beta);
    out.push_back(adj_t - adj_c);
  }
  return out;
}

double theta_from_matches(const ObservationSet& obs, const Eigen::VectorXd& beta, const MatchResult& matches) {
  const auto diffs = matched_differences(obs, beta, matches);
  double sum = 0.0;
  for (const double d : diffs) sum += d;
  return sum / static_cast<double>(diffs.size());
}

AttEstimate estimate_att(const ObservationSet& obs, const SplitAssignment& splits) {
  AttEstimate est;
  est.splits = splits;
  est.gamma = labelled("gamma split (I1)", [&] { return fit_gamma(obs, splits.i1); });

  est.eta_hat.assign(obs.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto* block : {&splits.i2, &splits.i3}) {
    const auto eta = residuals_eta(est.gamma, obs, *block);
    for (std::size_t k = 0; k < block->size(); ++k) est.eta_hat[(*block)[k]] = eta[k];
  }

  est.beta = labelled("beta split (I2)", [&] { return fit_beta(obs, splits.i2, est.eta_hat); });

  std::vector<KeyedValue> treated, controls;
  for (const auto r : splits.i3) {
    (obs.treated(r) ? treated : controls).push_back({est.eta_hat[r], r});
  }
  est.n_treated_i3 = treated.size();
  est.n_control_i3 = controls.size();
  est.matches = labelled("matching split (I3)", [&] { return match_controls(treated, controls); });

  est.theta_hat = theta_from_matches(obs, est.beta.beta_hat, est.matches);
  return est;
}

CrossfitEstimate estimate_att_crossfit(const ObservationSet& obs, std::uint64_t seed, bool shuffle) {
  const auto base = split_three_way(obs.size(), seed, shuffle);
  CrossfitEstimate cf;
  for (int r = 0; r < 3; ++r) {
    try {
      cf.rotations[static_cast<std::size_t>(r)] = estimate_att(obs, base.rotated(r));
    } catch (const Error& e) {
      throw e.with_context("cross-fit rotation " + std::to_string(r));
    }
  }
  cf.theta_cf = (cf.rotations[0].theta_hat + cf.rotations[1].theta_hat + cf.rotations[2].theta_hat) / 3.0;
  return cf;
}

}  // namespace rdmatch
