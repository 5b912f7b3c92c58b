#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "drlqg/errors.hpp"
#include "drlqg/gauss_ot.hpp"
#include "helpers.hpp"

using namespace drlqg;

namespace {
GaussianSpec gauss(const Eigen::VectorXd& m, const Eigen::MatrixXd& c) {
  return GaussianSpec{m, c};
}
Eigen::MatrixXd scalar(double v) {
  return Eigen::MatrixXd::Constant(1, 1, v);
}
}  // namespace

TEST_CASE("covariance transport cost vanishes on equal inputs") {
  Rng rng(51);
  const Eigen::MatrixXd S = testutil::random_pd(rng, 3);
  CHECK(ell(S, S) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("scalar covariance transport cost") {
  CHECK(ell(scalar(1.0), scalar(2.25)) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("commuting diagonal covariances transport eigenvalue-wise") {
  Eigen::MatrixXd a = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  Eigen::MatrixXd b = Eigen::Vector2d(4.0, 1.0).asDiagonal();
  CHECK(ell(a, b) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("transport cost rejects indefinite inputs") {
  Eigen::MatrixXd bad = Eigen::Vector2d(1.0, -0.5).asDiagonal();
  CHECK_THROWS_AS(ell(bad, Eigen::MatrixXd::Identity(2, 2)),
                  DefinitenessError);
}

TEST_CASE("distance between identical moment pairs is zero") {
  Rng rng(52);
  const GaussianSpec g =
      gauss(testutil::random_vector(rng, 2), testutil::random_pd(rng, 2));
  // the square root halves the usable precision of the trace cancellation
  CHECK(gelbrich_distance(g, g) <= 1e-7);
}

TEST_CASE("scalar distance is the standard-deviation gap") {
  CHECK(gelbrich_distance(gauss(Eigen::VectorXd::Zero(1), scalar(2.25)),
                          gauss(Eigen::VectorXd::Zero(1), scalar(1.0))) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("point-mass distance is the mean shift") {
  Eigen::VectorXd m(2);
  m << 3.0, -4.0;
  CHECK(gelbrich_distance(gauss(m, Eigen::MatrixXd::Zero(2, 2)),
                          gauss(Eigen::VectorXd::Zero(2),
                                Eigen::MatrixXd::Zero(2, 2))) ==
        doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianSpec a =
        gauss(testutil::random_vector(rng, 2), testutil::random_pd(rng, 2));
    const GaussianSpec b =
        gauss(testutil::random_vector(rng, 2), testutil::random_pd(rng, 2));
    const GaussianSpec c =
        gauss(testutil::random_vector(rng, 2), testutil::random_pd(rng, 2));
    const double ab = gelbrich_distance(a, b);
    const double ba = gelbrich_distance(b, a);
    CHECK(std::abs(ab - ba) <= 1e-10 * (1.0 + ab));
    CHECK(ab <= gelbrich_distance(a, c) + gelbrich_distance(c, b) + 1e-10);
  }
}

TEST_CASE("transport cost is the squared distance at equal means") {
  Rng rng(54);
  const Eigen::MatrixXd s1 = testutil::random_pd(rng, 3);
  const Eigen::MatrixXd s2 = testutil::random_pd(rng, 3);
  const double d = gelbrich_distance(gauss(Eigen::VectorXd::Zero(3), s1),
                                     gauss(Eigen::VectorXd::Zero(3), s2));
  CHECK(ell(s1, s2) == doctest::Approx(d * d).epsilon(1e-10));
}

TEST_CASE("identity pushforward leaves moments unchanged") {
  Rng rng(55);
  const GaussianSpec g =
      gauss(testutil::random_vector(rng, 2), testutil::random_pd(rng, 2));
  const GaussianSpec out = affine_pushforward_moments(
      Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), g);
  CHECK((out.mean - g.mean).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((out.cov - g.cov).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("scalar worst-case pushforward inflates the covariance") {
  // (1 − P/λ)^{-1} with P = 1, λ = 3 scales the variance by (3/2)² = 2.25
  const double map = 1.0 / (1.0 - 1.0 / 3.0);
  const GaussianSpec out = affine_pushforward_moments(
      scalar(map), Eigen::VectorXd::Zero(1),
      gauss(Eigen::VectorXd::Zero(1), scalar(1.0)));
  CHECK(out.cov(0, 0) == doctest::Approx(2.25).epsilon(1e-12));
}

TEST_CASE("constant pushforward is a point mass") {
  Eigen::VectorXd b(2);
  b << 1.0, 2.0;
  Rng rng(56);
  const GaussianSpec out = affine_pushforward_moments(
      Eigen::MatrixXd::Zero(2, 2), b,
      gauss(testutil::random_vector(rng, 2), testutil::random_pd(rng, 2)));
  CHECK((out.mean - b).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(out.cov.isZero(1e-14));
}

TEST_CASE("symmetric pushforward distance matches the transport cost") {
  Rng rng(57);
  const Eigen::MatrixXd ref = testutil::random_pd(rng, 2);
  Eigen::MatrixXd A = testutil::random_pd(rng, 2, 0.5);  // symmetric PD map
  const GaussianSpec hat = gauss(Eigen::VectorXd::Zero(2), ref);
  const GaussianSpec pushed =
      affine_pushforward_moments(A, Eigen::VectorXd::Zero(2), hat);
  const double d = gelbrich_distance(pushed, hat);
  CHECK(d * d == doctest::Approx(ell(A * ref * A.transpose(), ref))
                     .epsilon(1e-9));
}
