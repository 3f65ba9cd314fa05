#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "rdmatch/error.hpp"
#include "rdmatch/simulate.hpp"
#include "rdmatch/stats.hpp"

using namespace rdmatch;

TEST_CASE("generator is deterministic and shaped as documented") {
  sim::DgpConfig cfg;
  cfg.n = 500;
  cfg.seed = 9;
  const auto a = sim::generate_with_truth(cfg);
  const auto b = sim::generate_with_truth(cfg);
  CHECK(a.obs.y() == b.obs.y());
  CHECK(a.obs.dim_x() == 3);
  CHECK(a.obs.dim_z() == 4);
  CHECK(a.obs.x() == a.obs.z().leftCols(3));
  for (std::size_t i = 0; i < 500; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    CHECK(a.obs.q()(r) == a.obs.z()(r, 3) + a.eta[i]);
    CHECK(std::abs(a.eta[i]) <= 1.0);
    CHECK(a.alpha[i] == sim::true_alpha(sim::IteKind::XandEta, a.obs.x()(r, 0), a.obs.x()(r, 1), a.obs.x()(r, 2),
                                        a.eta[i]));
  }
  cfg.seed = 10;
  CHECK(sim::generate(cfg).y() != a.obs.y());
  cfg.n = 8;
  CHECK_THROWS_AS(sim::generate(cfg), Error);
}

TEST_CASE("alpha for the two cases") {
  CHECK(sim::true_alpha(sim::IteKind::XOnly, 2.0, 3.0, -1.0, 0.5) == 1.0);
  CHECK(sim::true_alpha(sim::IteKind::XandEta, 2.0, 3.0, -1.0, 0.5) == 1.25);
}

TEST_CASE("moments of the simulated design") {
  sim::DgpConfig cfg;
  cfg.n = 1'000'000;
  cfg.seed = 31;
  const auto data = sim::generate_with_truth(cfg);
  // Var U(-1,1) = 1/3
  CHECK(std::abs(stats::sample_variance(data.eta) - 1.0 / 3.0) <= 0.003);
  double sum = 0.0;
  std::size_t controls = 0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(cfg.n); ++i) {
    if (data.obs.q()(i) < 0.0) {
      sum += data.obs.y()(i);
      ++controls;
    }
  }
  // quadrature value, tests/oracles/control_mean.py
  CHECK(std::abs(sum / static_cast<double>(controls) - -0.12098536225957168) <= 0.01);
}

TEST_CASE("the noiseless null has Y = X1 + X3 exactly") {
  sim::DgpConfig cfg;
  cfg.n = 100;
  cfg.noiseless_null = true;
  const auto data = sim::generate_with_truth(cfg);
  for (Eigen::Index i = 0; i < 100; ++i) CHECK(data.obs.y()(i) == data.obs.x()(i, 0) + data.obs.x()(i, 2));
}

TEST_CASE("true ATT oracle") {
  const auto est = sim::true_att_oracle_detail(400'000, 1);
  CHECK(std::abs(est.mean - sim::kTrueAtt) <= 4.0 * est.std_error);
  CHECK(std::abs(static_cast<double>(est.accepted) / 400'000.0 - 0.5) <= 0.005);

  const auto constant = sim::true_att_oracle_detail(100'000, 2, [](std::span<const double>, double) { return 2.0; });
  CHECK(constant.mean == 2.0);
  CHECK(constant.std_error == 0.0);

  // E[eta^2 | treated] = 1/3 by symmetry of the acceptance region
  const auto eta_sq = sim::true_att_oracle_detail(400'000, 3, [](std::span<const double>, double e) { return e * e; });
  CHECK(std::abs(eta_sq.mean - 1.0 / 3.0) <= 4.0 * eta_sq.std_error);

  CHECK_THROWS_AS(sim::true_att_oracle(99'999, 1), Error);
}

TEST_CASE("Monte-Carlo harness scaling and hooks") {
  sim::DgpConfig cfg;
  cfg.n = 900;
  const auto exact = sim::monte_carlo_att(cfg, 30, false, 5, 0,
                                          [](const ObservationSet&, std::uint64_t) { return sim::kTrueAtt; });
  CHECK(exact.mean == 0.0);
  CHECK(exact.variance == 0.0);
  CHECK(exact.reps == 30);

  // theta = theta0 + 1/sqrt(300) gives zeta = 1 under the non-crossfit scaling
  const auto shifted = sim::monte_carlo_att(
      cfg, 30, false, 5, 0, [](const ObservationSet&, std::uint64_t) { return sim::kTrueAtt + 1.0 / std::sqrt(300.0); });
  CHECK(shifted.mean == doctest::Approx(1.0).epsilon(1e-12));
  const auto shifted_cf = sim::monte_carlo_att(
      cfg, 30, true, 5, 0, [](const ObservationSet&, std::uint64_t) { return sim::kTrueAtt + 1.0 / std::sqrt(900.0); });
  CHECK(shifted_cf.mean == doctest::Approx(1.0).epsilon(1e-12));

  // seeds handed to the estimator are the documented per-replicate seeds
  std::vector<std::uint64_t> seen(30);
  sim::monte_carlo_att(
      cfg, 30, false, 5, 1,
      [&](const ObservationSet&, std::uint64_t s) {
        for (std::size_t k = 0; k < 30; ++k)
          if (sim::replicate_seed(5, k) == s) seen[k] = s;
        return 0.0;
      });
  for (std::size_t k = 0; k < 30; ++k) CHECK(seen[k] == sim::replicate_seed(5, k));

  CHECK_THROWS_AS(sim::monte_carlo_att(cfg, 29, false, 5), Error);

  const auto real = sim::monte_carlo_att(cfg, 30, false, 5, 1);
  const auto real_threads = sim::monte_carlo_att(cfg, 30, false, 5, 3);
  CHECK(real.thetas == real_threads.thetas);
  const auto j = sim::to_json(real);
  CHECK(j.at("zetas").size() == 30);
  CHECK(j.at("theta0").get<double>() == sim::kTrueAtt);
}

TEST_CASE("ITE harness with the truth as the model") {
  sim::DgpConfig cfg;
  cfg.n = 1500;
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto mses = sim::monte_carlo_ite(cfg, SplineBasisSpec{}, seeds, 0,
                                         [](const sim::SimulatedData& d, std::size_t r) { return d.alpha[r]; });
  for (const double m : mses) CHECK(m == 0.0);
  const auto fitted = sim::monte_carlo_ite(cfg, SplineBasisSpec{}, seeds, 0);
  for (const double m : fitted) CHECK(m > 0.0);
}

TEST_CASE("csv writers") {
  sim::DgpConfig cfg;
  cfg.n = 9;
  const auto obs = sim::generate(cfg);
  const auto p = std::filesystem::temp_directory_path() / "rdmatch_test_dgp.csv";
  sim::write_dgp_csv(p, obs);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "y,x1,x2,x3,x4,q");
  const auto back = load_csv(p, sim::dgp_columns());
  CHECK(back.y() == obs.y());
  CHECK(back.z() == obs.z());
  CHECK(back.q() == obs.q());

  const auto h = std::filesystem::temp_directory_path() / "rdmatch_test_hist.csv";
  const std::vector<stats::HistogramBin> bins{{0.0, 0.5, 3}, {0.5, 1.0, 1}};
  sim::write_histogram_csv(h, bins);
  std::ifstream hin(h);
  std::string line;
  std::getline(hin, line);
  CHECK(line == "bin_left,bin_right,count");
  std::getline(hin, line);
  CHECK(line == "0,0.5,3");
}
