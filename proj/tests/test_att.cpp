#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "rdmatch/att.hpp"
#include "rdmatch/error.hpp"
#include "rdmatch/simulate.hpp"

using namespace rdmatch;

namespace {

ObservationSet hand_fixture() {
  const std::vector<std::vector<double>> z{{1}, {2}, {3}, {-1}, {2}, {-2}, {0.5}, {-0.5}, {-1.5}};
  return oracle::make_obs({0, 0, 0, 1, 3, -0.5, 4, 0.5, 2}, z, z, {0.5, 1.5, 1, -1, -0.5, -2, 1, -0.3, -1.2});
}

}  // namespace

TEST_CASE("nine-row fixture against the exact-arithmetic oracle") {
  const auto obs = hand_fixture();
  const auto est = estimate_att(obs, split_three_way(9, 0, false));
  // tests/oracles/hand_pipeline.py
  CHECK(est.gamma.gamma_hat(0) == doctest::Approx(13.0 / 28.0).epsilon(1e-14));
  CHECK(est.beta.sort_permutation == std::vector<std::size_t>{4, 5, 3});
  CHECK(est.beta.beta_hat(0) == doctest::Approx(31.0 / 34.0).epsilon(1e-14));
  CHECK(est.matches.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{6, 7}});
  CHECK(est.n_treated_i3 == 1);
  CHECK(est.n_control_i3 == 2);
  CHECK(est.theta_hat == doctest::Approx(44.0 / 17.0).epsilon(1e-14));
  CHECK(std::isnan(est.eta_hat[0]));
  CHECK(est.eta_hat[6] == doctest::Approx(0.7678571428571429).epsilon(1e-14));
}

TEST_CASE("exact null gives zero") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    sim::DgpConfig cfg;
    cfg.n = 900;
    cfg.seed = seed;
    cfg.noiseless_null = true;
    const auto obs = sim::generate(cfg);
    CHECK(std::abs(estimate_att(obs, split_three_way(obs.size(), seed)).theta_hat) <= 1e-8);
    CHECK(std::abs(estimate_att_crossfit(obs, seed).theta_cf) <= 1e-8);
  }
}

TEST_CASE("a constant outcome shift leaves theta unchanged") {
  sim::DgpConfig cfg;
  cfg.n = 3000;
  cfg.seed = 77;
  const auto obs = sim::generate(cfg);
  const auto split = split_three_way(obs.size(), 77);
  const auto base = estimate_att(obs, split);
  const auto shifted = estimate_att(obs.with_outcome((obs.y().array() + 2.0).matrix()), split);
  CHECK(shifted.matches == base.matches);
  CHECK(shifted.theta_hat == doctest::Approx(base.theta_hat).epsilon(1e-9));
}

TEST_CASE("theta decomposes into stored matched differences") {
  sim::DgpConfig cfg;
  cfg.n = 2400;
  cfg.seed = 4;
  const auto obs = sim::generate(cfg);
  const auto est = estimate_att(obs, split_three_way(obs.size(), 4));
  const auto diffs = matched_differences(obs, est.beta.beta_hat, est.matches);
  REQUIRE(diffs.size() == est.n_treated_i3);
  const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(diffs.size());
  CHECK(mean == doctest::Approx(est.theta_hat).epsilon(1e-12));
  CHECK(theta_from_matches(obs, est.beta.beta_hat, est.matches) == doctest::Approx(est.theta_hat).epsilon(1e-12));

  // every treated row of the matching split is paired with a control from that split
  std::vector<char> in_i3(obs.size(), 0);
  for (const auto r : est.splits.i3) in_i3[r] = 1;
  for (const auto& [t, c] : est.matches.pairs) {
    CHECK(in_i3[t]);
    CHECK(in_i3[c]);
    CHECK(obs.treated(t));
    CHECK_FALSE(obs.treated(c));
  }
}

TEST_CASE("cross-fitting averages the three rotations of one partition") {
  sim::DgpConfig cfg;
  cfg.n = 1200;
  cfg.seed = 10;
  const auto obs = sim::generate(cfg);
  const auto cf = estimate_att_crossfit(obs, 10);
  const auto split = split_three_way(obs.size(), 10);
  for (int r = 0; r < 3; ++r) {
    const auto single = estimate_att(obs, split.rotated(r));
    CHECK(cf.rotations[static_cast<std::size_t>(r)].theta_hat == single.theta_hat);
  }
  const double avg = (cf.rotations[0].theta_hat + cf.rotations[1].theta_hat + cf.rotations[2].theta_hat) / 3.0;
  CHECK(cf.theta_cf == avg);
}

TEST_CASE("failures name the split that caused them") {
  // every row of the second block is treated, so beta has no controls
  const std::vector<std::vector<double>> z{{1}, {2}, {3}, {-1}, {2}, {-2}, {0.5}, {-0.5}, {-1.5}};
  const auto obs = oracle::make_obs(std::vector<double>(9, 1.0), z, z, {0.5, 1.5, 1, 1, 1, 1, 1, -0.3, -1.2});
  try {
    estimate_att(obs, split_three_way(9, 0, false));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyControlGroup);
    CHECK(std::string(e.what()).find("beta split (I2)") != std::string::npos);
  }

  const auto no_treated = oracle::make_obs(std::vector<double>(9, 1.0), z, z, {0.5, 1.5, 1, -1, -0.5, -2, -1, -0.3, -1.2});
  try {
    estimate_att(no_treated, split_three_way(9, 0, false));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyTreatedGroup);
    CHECK(std::string(e.what()).find("matching split (I3)") != std::string::npos);
  }
}
