#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rdmatch/error.hpp"
#include "rdmatch/linreg.hpp"

using namespace rdmatch;

TEST_CASE("ols: constant and exactly consistent systems") {
  const auto c = ols(Eigen::MatrixXd::Ones(3, 1), Eigen::Vector3d(2, 2, 2));
  CHECK(c.coef(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.residuals.cwiseAbs().maxCoeff() < 1e-14);

  Eigen::MatrixXd a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  const auto e = ols(a, Eigen::Vector3d(1, 2, 3));
  CHECK(e.coef(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.coef(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(e.residuals.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ols: line fit matches the hand-solved normal equations") {
  // A'A = [[4,10],[10,30]], A'b = [28,77], det 20 -> (70/20, 28/20)
  Eigen::MatrixXd a(4, 2);
  a << 1, 1, 1, 2, 1, 3, 1, 4;
  const auto fit = ols(a, Eigen::Vector4d(6, 5, 7, 10));
  CHECK(fit.coef(0) == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(fit.coef(1) == doctest::Approx(1.4).epsilon(1e-12));
  CHECK((fit.residuals - (Eigen::Vector4d(6, 5, 7, 10) - a * fit.coef)).norm() == 0.0);
}

TEST_CASE("ols: error paths") {
  Eigen::MatrixXd a(4, 2);
  a << 1, 2, 2, 4, 3, 6, 4, 8;
  try {
    ols(a, Eigen::Vector4d(1, 2, 3, 4));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
  CHECK_THROWS_AS(ols(Eigen::MatrixXd::Ones(2, 3), Eigen::Vector2d(1, 2)), Error);
  CHECK_THROWS_AS(ols(Eigen::MatrixXd::Ones(4, 1), Eigen::Vector3d(1, 2, 3)), Error);
  CHECK_THROWS_AS(ols(Eigen::MatrixXd::Zero(4, 1), Eigen::Vector4d(1, 2, 3, 4)), Error);
}

TEST_CASE("ols: recovers coefficients of vectors in the column span") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index p = 1 + trial % 6;
    const Eigen::Index m = p + 3 + trial % 40;
    const Eigen::MatrixXd a = oracle::random_design(rng, m, p);
    Eigen::VectorXd v(p);
    for (Eigen::Index j = 0; j < p; ++j) v(j) = nd(rng);
    const auto fit = ols(a, a * v);
    CHECK((fit.coef - v).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + v.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("ols: residuals are orthogonal to the columns on 1000 random systems") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index p = 1 + trial % 5;
    const Eigen::Index m = p + 1 + trial % 60;
    const Eigen::MatrixXd a = oracle::random_design(rng, m, p);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) b(i) = 5.0 * nd(rng);
    const auto fit = ols(a, b);
    const double scale = 1.0 + a.cwiseAbs().rowwise().sum().maxCoeff() * b.cwiseAbs().maxCoeff();
    REQUIRE((a.transpose() * fit.residuals).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  }
}

TEST_CASE("ols: joint row permutation leaves coefficients unchanged") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index p = 1 + trial % 4, m = 30;
    const Eigen::MatrixXd a = oracle::random_design(rng, m, p);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) b(i) = nd(rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(m);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + m, rng);
    const auto f1 = ols(a, b);
    const auto f2 = ols(perm * a, perm * b);
    CHECK((f1.coef - f2.coef).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
