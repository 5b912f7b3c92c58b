#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "drlqg/best_response.hpp"
#include "drlqg/cost.hpp"
#include "drlqg/equilibrium.hpp"
#include "drlqg/gauss_ot.hpp"
#include "drlqg/stacked.hpp"
#include "helpers.hpp"

using namespace drlqg;

namespace {

// Small output-feedback instance with a well-conditioned ambiguity pair.
struct Instance {
  ControlProblem problem;
  AmbiguitySpec amb;
};

Instance random_instance(drlqg::Rng& rng) {
  Instance inst;
  inst.problem = testutil::random_problem(rng, 2, 1, 1, 2);
  inst.problem.x0 = testutil::random_vector(rng, 2, 0.3);
  inst.amb.cov_v_ref = testutil::random_pd(rng, 2, 0.5);
  inst.amb.cov_w_ref = testutil::random_pd(rng, 1, 0.5);
  inst.amb.rho_v = 0.3;
  inst.amb.rho_w = 0.2;
  return inst;
}

double policy_cost_at(const ControlProblem& prob, const LinearPolicy& pol,
                      const NoiseMoments& moments) {
  return expected_cost(testutil::policy_quadratic(prob, pol), moments);
}

// Alternation converges linearly with an instance-dependent rate; the strict
// 1e-8 policy tolerance can need a few thousand rounds on unlucky draws.
EquilibriumOptions patient_options() {
  EquilibriumOptions opts;
  opts.max_rounds = 5000;
  return opts;
}

}  // namespace

TEST_CASE("zero radii reduce the game to nominal LQG") {
  drlqg::Rng rng(81);
  const ControlProblem prob = testutil::random_problem(rng, 2, 1, 1, 2);
  AmbiguitySpec amb;
  amb.cov_v_ref = testutil::random_pd(rng, 2, 0.5);
  amb.cov_w_ref = testutil::random_pd(rng, 1, 0.5);
  amb.rho_v = 0.0;
  amb.rho_w = 0.0;
  const Equilibrium eq = iterated_best_response(prob, amb);
  const NoiseMoments ref = reference_moments(amb.cov_v_ref, amb.cov_w_ref);
  const double nominal = dp_lqg_value(prob, ref);
  CHECK(std::abs(eq.value - nominal) <= 1e-8 * std::max(1.0, nominal));
  CHECK(eq.gap <= 1e-8);
  CHECK((eq.nature.cov_v - amb.cov_v_ref).norm() <= 1e-12);
  CHECK((eq.nature.cov_w - amb.cov_w_ref).norm() <= 1e-12);
  CHECK(eq.nature.mean_v.isZero(1e-12));
}

TEST_CASE("scalar game value matches a dense grid over nature") {
  // Double integrator-free scalar loop; adversary budget mostly on the
  // process channel.  The grid sweeps the process-noise mean with the
  // covariance pushed to the outer boundary sheet (the optimal value is
  // nondecreasing in the noise covariance), and the measurement channel sits
  // on its own (tiny) boundary.
  const ControlProblem prob = testutil::example_problem();
  AmbiguitySpec amb;
  amb.cov_v_ref = Eigen::MatrixXd::Constant(1, 1, 1.0);
  amb.cov_w_ref = Eigen::MatrixXd::Constant(1, 1, 1e-4);
  amb.rho_v = 0.5;
  amb.rho_w = 1e-6;

  const Equilibrium eq = iterated_best_response(prob, amb);
  CHECK(eq.gap <= 1e-6);

  const double sw = 0.01 + 1e-6;  // measurement std at its boundary
  double best = -1e300;
  const int grid = 401;
  for (int i = 0; i < grid; ++i) {
    const double m = -amb.rho_v + 2.0 * amb.rho_v * i / (grid - 1);
    const double slack = amb.rho_v * amb.rho_v - m * m;
    const double sv = 1.0 + std::sqrt(std::max(0.0, slack));
    NoiseMoments moments;
    moments.mean_v = Eigen::VectorXd::Constant(1, m);
    moments.cov_v = Eigen::MatrixXd::Constant(1, 1, sv * sv);
    moments.mean_w = Eigen::VectorXd::Zero(1);
    moments.cov_w = Eigen::MatrixXd::Constant(1, 1, sw * sw);
    best = std::max(best, dp_lqg_value(prob, moments));
  }
  CHECK(eq.value == doctest::Approx(best).epsilon(1e-3));
}

TEST_CASE("equilibrium certifies a small deviation gap") {
  drlqg::Rng rng(82);
  const Instance inst = random_instance(rng);
  const Equilibrium eq = iterated_best_response(inst.problem, inst.amb, patient_options());
  CHECK(eq.gap <= 1e-6);
  CHECK(eq.rounds >= 2);
  CHECK(eq.rounds == static_cast<int>(eq.trace.size()));
  CHECK(eq.trace.back().policy_delta <= 1e-8);

  // nature cannot improve on sampled feasible moments
  drlqg::Rng sampler(83);
  const NoiseQuadratic nq = testutil::policy_quadratic(inst.problem, eq.policy);
  for (int i = 0; i < 200; ++i) {
    const NoiseMoments cand =
        sample_feasible_moments(inst.amb, sampler, i % 2 == 0);
    CHECK(expected_cost(nq, cand) <= eq.value + 1e-6);
  }

  // the controller cannot improve by small causal deviations
  for (int i = 0; i < 50; ++i) {
    const LinearPolicy delta = testutil::random_causal_policy(
        rng, inst.problem.horizon, inst.problem.input_dim(),
        inst.problem.output_dim(), 1e-2);
    LinearPolicy perturbed = eq.policy;
    perturbed.U += delta.U;
    perturbed.q += delta.q;
    CHECK(policy_cost_at(inst.problem, perturbed, eq.nature) >=
          eq.value - 1e-6);
  }

  // both one-sided values agree with the reported one
  const NoiseQuadratic nq_star = testutil::policy_quadratic(inst.problem, eq.policy);
  const double max_side = solve_worst_case(nq_star, inst.amb).cost;
  const StackedMatrices stacked = assemble_stacked(inst.problem);
  const LinearPolicy br = best_linear_response(stacked, eq.nature, inst.problem.x0);
  const double min_side = policy_cost_at(inst.problem, br, eq.nature);
  CHECK(std::abs(max_side - eq.value) <= 1e-9 * std::max(1.0, eq.value));
  CHECK(std::abs(min_side - eq.value) <= 1e-6 * std::max(1.0, eq.value));
}

TEST_CASE("gap detects a deliberately degraded policy") {
  drlqg::Rng rng(84);
  const Instance inst = random_instance(rng);
  const Equilibrium eq = iterated_best_response(inst.problem, inst.amb, patient_options());
  Equilibrium off = eq;
  off.policy.U *= 1.1;
  const double gap_off =
      nash_gap(off, inst.problem, inst.amb, 100, 0x9f2d3c4b5a697887ull);
  CHECK(gap_off > 1e-7);
  CHECK(gap_off > eq.gap);
}

TEST_CASE("runs are deterministic") {
  drlqg::Rng rng(85);
  const Instance inst = random_instance(rng);
  const Equilibrium a = iterated_best_response(inst.problem, inst.amb, patient_options());
  const Equilibrium b = iterated_best_response(inst.problem, inst.amb, patient_options());
  CHECK(a.value == b.value);
  CHECK(a.gap == b.gap);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].value == b.trace[i].value);
    CHECK(a.trace[i].policy_delta == b.trace[i].policy_delta);
  }
  CHECK((a.policy.U - b.policy.U).norm() == 0.0);
}

TEST_CASE("gradient outer loop agrees with the alternation") {
  const ControlProblem prob = testutil::example_problem();
  AmbiguitySpec amb;
  amb.cov_v_ref = Eigen::MatrixXd::Constant(1, 1, 1.0);
  amb.cov_w_ref = Eigen::MatrixXd::Constant(1, 1, 0.25);
  amb.rho_v = 0.3;
  amb.rho_w = 0.1;
  const Equilibrium ibr = iterated_best_response(prob, amb);

  EquilibriumOptions opts;
  opts.use_danskin = true;
  opts.max_rounds = 20000;
  opts.value_tolerance = 1e-8;
  opts.policy_tolerance = 1e-6;
  const Equilibrium grad = iterated_best_response(prob, amb, opts);
  CHECK(grad.value == doctest::Approx(ibr.value).epsilon(1e-3));
}

TEST_CASE("alternation repelled from the saddle falls back to descent") {
  // On this two-state plant the linearized alternation map has an unstable
  // positive-real eigenvalue: plain best-response orbits the saddle point
  // (policy steps regrow after nearly converging) and only the gradient
  // fallback reaches it. Keep it as a regression instance.
  ControlProblem prob;
  prob.horizon = 3;
  Eigen::MatrixXd A(2, 2), B(2, 1), C(1, 2);
  A << 0.9, 0.2, 0.0, 0.8;
  B << 0.0, 1.0;
  C << 1.0, 0.0;
  prob.A = {A, A, A};
  prob.B = {B, B, B};
  prob.C = {C, C, C};
  prob.Q.assign(4, Eigen::MatrixXd::Identity(2, 2));
  prob.R.assign(3, 0.4 * Eigen::MatrixXd::Identity(1, 1));
  prob.x0 = Eigen::VectorXd(2);
  prob.x0 << 0.5, -0.3;

  AmbiguitySpec amb;
  amb.cov_v_ref = Eigen::MatrixXd(2, 2);
  amb.cov_v_ref << 0.5, 0.1, 0.1, 0.6;
  amb.cov_w_ref = 0.2 * Eigen::MatrixXd::Identity(1, 1);
  amb.rho_v = 0.4;
  amb.rho_w = 0.15;

  EquilibriumOptions opts;
  opts.max_rounds = 2000;
  const Equilibrium eq = iterated_best_response(prob, amb, opts);
  CHECK(eq.gap <= 1e-6);

  EquilibriumOptions grad_opts = opts;
  grad_opts.use_danskin = true;
  const Equilibrium grad = iterated_best_response(prob, amb, grad_opts);
  CHECK(eq.value == doctest::Approx(grad.value).epsilon(1e-6));
}

TEST_CASE("round budget exhaustion raises a divergence with its trace") {
  drlqg::Rng rng(86);
  const Instance inst = random_instance(rng);
  EquilibriumOptions opts;
  opts.max_rounds = 1;  // convergence needs at least two value evaluations
  try {
    iterated_best_response(inst.problem, inst.amb, opts);
    FAIL("expected EquilibriumDivergence");
  } catch (const EquilibriumDivergence& e) {
    CHECK(e.trace.size() == 1);
    CHECK(e.trace[0].round == 1);
  }
}

TEST_CASE("sampled moments stay inside the ambiguity ball") {
  drlqg::Rng rng(87);
  AmbiguitySpec amb;
  amb.cov_v_ref = testutil::random_pd(rng, 2, 0.5);
  amb.cov_w_ref = testutil::random_pd(rng, 1, 0.5);
  amb.rho_v = 0.4;
  amb.rho_w = 0.25;
  for (int i = 0; i < 100; ++i) {
    const bool boundary = i % 2 == 0;
    const NoiseMoments s = sample_feasible_moments(amb, rng, boundary);
    const GaussianSpec ref_v{Eigen::VectorXd::Zero(2), amb.cov_v_ref};
    const GaussianSpec ref_w{Eigen::VectorXd::Zero(1), amb.cov_w_ref};
    const double dv = gelbrich_distance(ref_v, {s.mean_v, s.cov_v});
    const double dw = gelbrich_distance(ref_w, {s.mean_w, s.cov_w});
    CHECK(dv <= amb.rho_v + 1e-7);
    CHECK(dw <= amb.rho_w + 1e-7);
    if (boundary) {
      CHECK(std::abs(dv - amb.rho_v) <= 1e-6);
      CHECK(std::abs(dw - amb.rho_w) <= 1e-6);
    }
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.cov_v)
              .eigenvalues()
              .minCoeff() >= -1e-12);
  }
}
