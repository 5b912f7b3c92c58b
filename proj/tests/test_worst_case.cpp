#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "drlqg/cost.hpp"
#include "drlqg/equilibrium.hpp"
#include "drlqg/errors.hpp"
#include "drlqg/gauss_ot.hpp"
#include "drlqg/worst_case.hpp"
#include "helpers.hpp"

using namespace drlqg;

namespace {

NoiseQuadratic scalar_nq(double Pv, double Pw, double Nv = 0.0,
                         double Nw = 0.0, double S = 0.0, double nv = 0.0,
                         double nw = 0.0, double c0 = 0.0) {
  NoiseQuadratic nq;
  nq.Pv = Eigen::MatrixXd::Constant(1, 1, Pv);
  nq.Pw = Eigen::MatrixXd::Constant(1, 1, Pw);
  nq.Nv = Eigen::MatrixXd::Constant(1, 1, Nv);
  nq.Nw = Eigen::MatrixXd::Constant(1, 1, Nw);
  nq.S = Eigen::MatrixXd::Constant(1, 1, S);
  nq.nv = Eigen::VectorXd::Constant(1, nv);
  nq.nw = Eigen::VectorXd::Constant(1, nw);
  nq.c0 = c0;
  return nq;
}

AmbiguitySpec scalar_amb(double rho_v, double rho_w, double var_v = 1.0,
                         double var_w = 1.0) {
  AmbiguitySpec amb;
  amb.cov_v_ref = Eigen::MatrixXd::Constant(1, 1, var_v);
  amb.cov_w_ref = Eigen::MatrixXd::Constant(1, 1, var_w);
  amb.rho_v = rho_v;
  amb.rho_w = rho_w;
  return amb;
}

// Random desk-scale quadratic realized by an actual closed loop, so every
// structural property (PSD diagonals, coupling pattern) holds by construction.
struct RandomCase {
  NoiseQuadratic nq;
  AmbiguitySpec amb;
};

RandomCase random_case(Rng& rng, bool with_offsets) {
  const int n = 1 + static_cast<int>(rng.uniform() * 2);  // 1..2
  const int p = 1 + static_cast<int>(rng.uniform() * 2);
  const int T = 2 + static_cast<int>(rng.uniform() * 2);  // 2..3
  ControlProblem prob = testutil::random_problem(rng, n, 1, p, T);
  if (!with_offsets) prob.x0.setZero();
  LinearPolicy pol = testutil::random_causal_policy(rng, T, 1, p, 0.6);
  if (!with_offsets) pol.q.setZero();
  RandomCase rc;
  rc.nq = testutil::policy_quadratic(prob, pol);
  rc.amb.cov_v_ref = testutil::random_pd(rng, n, 0.4);
  rc.amb.cov_w_ref = testutil::random_pd(rng, p, 0.4);
  rc.amb.rho_v = 0.2 + 0.6 * rng.uniform();
  rc.amb.rho_w = 0.2 + 0.6 * rng.uniform();
  return rc;
}

double boundary_gap(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                    const Eigen::MatrixXd& ref, double rho) {
  const GaussianSpec hat{Eigen::VectorXd::Zero(ref.rows()), ref};
  return std::abs(gelbrich_distance(GaussianSpec{mean, cov}, hat) - rho);
}

}  // namespace

TEST_CASE("mean system: homogeneous data gives zero means") {
  const NoiseQuadratic nq = scalar_nq(1.0, 0.5);
  const auto [mv, mw] = mean_system_solve(nq, 3.0, 2.0);
  CHECK(mv.isZero(1e-14));
  CHECK(mw.isZero(1e-14));
}

TEST_CASE("mean system: scalar forced channel") {
  const NoiseQuadratic nq = scalar_nq(0.0, 0.0, 0, 0, 0, 2.0, 0.0);
  const auto [mv, mw] = mean_system_solve(nq, 1.0, 1.0);
  CHECK(mv(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mw(0) == doctest::Approx(0.0));
}

TEST_CASE("mean system: random block system solves to tiny residual") {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    NoiseQuadratic nq;
    nq.Pv = testutil::random_psd(rng, 2);
    nq.Pw = testutil::random_psd(rng, 2);
    nq.Nv = testutil::random_matrix(rng, 2, 2, 0.3);
    nq.Nw = testutil::random_matrix(rng, 2, 2, 0.3);
    nq.S = testutil::random_matrix(rng, 2, 2, 0.5);
    nq.nv = testutil::random_vector(rng, 2);
    nq.nw = testutil::random_vector(rng, 2);
    const double lv = nq.Pv.eigenvalues().real().maxCoeff() + 2.0;
    const double lw = nq.Pw.eigenvalues().real().maxCoeff() + 2.0;
    const auto [mv, mw] = mean_system_solve(nq, lv, lw);
    const Eigen::MatrixXd symNv = 0.5 * (nq.Nv + nq.Nv.transpose());
    const Eigen::MatrixXd symNw = 0.5 * (nq.Nw + nq.Nw.transpose());
    const Eigen::VectorXd rv =
        (lv * Eigen::MatrixXd::Identity(2, 2) - nq.Pv - symNv) * mv -
        0.5 * nq.S.transpose() * mw - 0.5 * nq.nv;
    const Eigen::VectorXd rw =
        (lw * Eigen::MatrixXd::Identity(2, 2) - nq.Pw - symNw) * mw -
        0.5 * nq.S * mv - 0.5 * nq.nw;
    const double scale = 1.0 + nq.nv.norm() + nq.nw.norm();
    CHECK(rv.norm() + rw.norm() <= 1e-12 * scale);
  }
}

TEST_CASE("mean system rejects multipliers below the spectral bound") {
  const NoiseQuadratic nq = scalar_nq(1.0, 0.5);
  CHECK_THROWS_AS(mean_system_solve(nq, 0.9, 2.0), Error);
}

TEST_CASE("mean system reports a resonant (singular) configuration") {
  // λ_v − P_v − sym(N_v) = 5 − 1 − 4 = 0 while λ_v > λmax(P_v)
  const NoiseQuadratic nq = scalar_nq(1.0, 0.5, 4.0, 0.0);
  CHECK_THROWS_AS(mean_system_solve(nq, 5.0, 2.0), SingularSystemError);
}

TEST_CASE("radius residual closed forms") {
  const Eigen::MatrixXd P1 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::MatrixXd S1 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  CHECK(radius_residual(P1, S1, 3.0, zero, 0.5) ==
        doctest::Approx(0.0).epsilon(1e-12));

  Eigen::VectorXd m(1);
  m << 0.3;
  CHECK(radius_residual(Eigen::MatrixXd::Zero(1, 1), S1, 1.0, m, 0.5) ==
        doctest::Approx(0.09 - 0.25).epsilon(1e-12));

  CHECK(radius_residual(P1, S1, 1e9, zero, 0.5) ==
        doctest::Approx(-0.25).epsilon(1e-6));
  CHECK_THROWS_AS(radius_residual(P1, S1, 0.5, zero, 0.5), Error);
}

TEST_CASE("decoupled scalar worst case hits the closed-form fixture") {
  const WorstCaseSolution sol =
      solve_worst_case(scalar_nq(1.0, 0.5), scalar_amb(0.5, 0.5));
  CHECK(sol.lambda_v == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(sol.lambda_w == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(sol.moments.cov_v(0, 0) == doctest::Approx(2.25).epsilon(1e-9));
  CHECK(sol.moments.cov_w(0, 0) == doctest::Approx(2.25).epsilon(1e-9));
  CHECK(sol.moments.mean_v.isZero(1e-10));
  CHECK(sol.moments.mean_w.isZero(1e-10));
  // λρ² + λ·tr(Σ̂P(λI−P)^{-1}) per channel: (0.75 + 1.5) + (0.375 + 0.75),
  // equivalently tr(P_vΣ_v) + tr(P_wΣ_w) = 2.25 + 1.125
  CHECK(sol.cost_core == doctest::Approx(27.0 / 8.0).epsilon(1e-9));
  CHECK(sol.cost == doctest::Approx(sol.cost_core));
}

TEST_CASE("zero radii return the reference moments") {
  const NoiseQuadratic nq = scalar_nq(1.0, 0.5, -0.2, 0.1, 0.3, 0.4, -0.1);
  const AmbiguitySpec amb = scalar_amb(0.0, 0.0, 1.3, 0.7);
  const WorstCaseSolution sol = solve_worst_case(nq, amb);
  CHECK(sol.moments.mean_v.isZero(0.0));
  CHECK(sol.moments.mean_w.isZero(0.0));
  CHECK(sol.moments.cov_v(0, 0) == doctest::Approx(1.3));
  CHECK(sol.moments.cov_w(0, 0) == doctest::Approx(0.7));
  CHECK(std::isinf(sol.lambda_v));
  CHECK(std::isinf(sol.lambda_w));
  CHECK(sol.cost_core ==
        doctest::Approx(1.0 * 1.3 + 0.5 * 0.7).epsilon(1e-12));
}

TEST_CASE("mean-driven channel with an inert partner") {
  const NoiseQuadratic nq = scalar_nq(0.0, 0.0, 0, 0, 0, 2.0, 0.0);
  const WorstCaseSolution sol = solve_worst_case(nq, scalar_amb(1.0, 0.5));
  CHECK(sol.lambda_v == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.moments.mean_v(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.moments.cov_v(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  // w cannot affect the cost: reference moments, multiplier zero
  CHECK(sol.lambda_w == doctest::Approx(0.0));
  CHECK(sol.moments.cov_w(0, 0) == doctest::Approx(1.0));
  CHECK(sol.cost_core == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("degenerate reference covariance is rejected") {
  CHECK_THROWS_AS(
      solve_worst_case(scalar_nq(1.0, 0.5), scalar_amb(0.5, 0.5, 0.0, 1.0)),
      DefinitenessError);
}

TEST_CASE("first-order residuals vanish at solutions and grow off them") {
  const NoiseQuadratic nq = scalar_nq(1.0, 0.5);
  const AmbiguitySpec amb = scalar_amb(0.5, 0.5);
  const WorstCaseSolution sol = solve_worst_case(nq, amb);
  const FirstOrderReport base = verify_first_order(sol, nq, amb);
  CHECK(base.max_residual() <= 1e-9);

  WorstCaseSolution off = sol;
  off.lambda_v *= 1.0 + 1e-3;
  const FirstOrderReport bumped = verify_first_order(off, nq, amb);
  CHECK(bumped.max_residual() > 10.0 * base.max_residual() + 1e-8);
}

TEST_CASE("random coupled instances satisfy every optimality check") {
  Rng rng(62);
  for (int trial = 0; trial < 8; ++trial) {
    const RandomCase rc = random_case(rng, trial % 2 == 1);
    const WorstCaseSolution sol = solve_worst_case(rc.nq, rc.amb);

    // boundary activation and strict multiplier bounds
    CHECK(boundary_gap(sol.moments.mean_v, sol.moments.cov_v,
                       rc.amb.cov_v_ref, rc.amb.rho_v) <= 1e-8);
    CHECK(boundary_gap(sol.moments.mean_w, sol.moments.cov_w,
                       rc.amb.cov_w_ref, rc.amb.rho_w) <= 1e-8);
    const Eigen::MatrixXd Pv_sym = 0.5 * (rc.nq.Pv + rc.nq.Pv.transpose());
    const Eigen::MatrixXd Pw_sym = 0.5 * (rc.nq.Pw + rc.nq.Pw.transpose());
    CHECK(sol.lambda_v >
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Pv_sym)
                  .eigenvalues()
                  .maxCoeff() +
              1e-12);
    CHECK(sol.lambda_w >
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Pw_sym)
                  .eigenvalues()
                  .maxCoeff() +
              1e-12);

    // the reported cost is the expected cost at the returned moments
    const double ec = expected_cost(rc.nq, sol.moments);
    CHECK(std::abs(sol.cost - ec) <= 1e-8 * (1.0 + std::abs(ec)));
    CHECK(std::abs(sol.cost_core - (ec - rc.nq.c0)) <=
          1e-8 * (1.0 + std::abs(ec)));

    const FirstOrderReport fo = verify_first_order(sol, rc.nq, rc.amb);
    CHECK(fo.max_residual() <= 1e-7);
  }
}

TEST_CASE("worst case dominates sampled feasible moments") {
  Rng rng(63);
  const RandomCase rc = random_case(rng, true);
  const WorstCaseSolution sol = solve_worst_case(rc.nq, rc.amb);
  Rng sampler(64);
  for (int i = 0; i < 200; ++i) {
    const NoiseMoments cand =
        sample_feasible_moments(rc.amb, sampler, i % 2 == 0);
    CHECK(expected_cost(rc.nq, cand) <= sol.cost + 1e-8);
  }
}

TEST_CASE("worst-case cost grows with either radius") {
  Rng rng(65);
  const RandomCase rc = random_case(rng, true);
  double prev = -1e300;
  for (double rho : {0.05, 0.2, 0.5, 0.9}) {
    AmbiguitySpec amb = rc.amb;
    amb.rho_v = rho;
    amb.rho_w = rho;
    const double cost = solve_worst_case(rc.nq, amb).cost;
    CHECK(cost >= prev - 1e-9);
    prev = cost;
  }
}

TEST_CASE("solver iteration counter stays within budget") {
  Rng rng(66);
  const RandomCase rc = random_case(rng, true);
  SolverOptions opts;
  const WorstCaseSolution sol = solve_worst_case(rc.nq, rc.amb, opts);
  CHECK(sol.iterations >= 1);
  CHECK(sol.iterations <= opts.max_iter);
}
