#pragma once

// Shared fixtures for the test suites: the two-step scalar example system,
// deterministic random instance generators, and small conveniences.

#include <Eigen/Dense>

#include "drlqg/cost.hpp"
#include "drlqg/policy.hpp"
#include "drlqg/problem.hpp"
#include "drlqg/random.hpp"
#include "drlqg/stacked.hpp"
#include "drlqg/worst_case.hpp"

namespace testutil {

// Two-step scalar system x⁺ = −x + u + v, y = x + w, x0 = 0, with cost
// E[x_2² + ½(u_0² + u_1²)].  The interesting policies act only at t = 1.
inline drlqg::ControlProblem example_problem() {
  drlqg::ControlProblem p;
  p.horizon = 2;
  const Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, -1.0);
  const Eigen::MatrixXd B = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::MatrixXd C = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::MatrixXd R = Eigen::MatrixXd::Constant(1, 1, 0.5);
  p.A = {A, A};
  p.B = {B, B};
  p.C = {C, C};
  p.Q = {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1),
         Eigen::MatrixXd::Identity(1, 1)};
  p.R = {R, R};
  p.x0 = Eigen::VectorXd::Zero(1);
  return p;
}

// Purified-output form of the gain u_1 = K·x_1 on the example system
// (x_1 = η_1 − w_1; with exact observations the single block (1,1) carries K).
inline drlqg::LinearPolicy example_policy(double K) {
  drlqg::LinearPolicy pol = drlqg::make_zero_policy(2, 1, 1);
  pol.U(1, 1) = K;
  return pol;
}

inline double uniform_pm1(drlqg::Rng& rng) { return 2.0 * rng.uniform() - 1.0; }

inline Eigen::MatrixXd random_matrix(drlqg::Rng& rng, int rows, int cols,
                                     double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = scale * uniform_pm1(rng);
  return m;
}

inline Eigen::VectorXd random_vector(drlqg::Rng& rng, int dim,
                                     double scale = 1.0) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = scale * uniform_pm1(rng);
  return v;
}

inline Eigen::MatrixXd random_pd(drlqg::Rng& rng, int dim,
                                 double ridge = 0.3) {
  const Eigen::MatrixXd A = random_matrix(rng, dim, dim);
  return A * A.transpose() + ridge * Eigen::MatrixXd::Identity(dim, dim);
}

inline Eigen::MatrixXd random_psd(drlqg::Rng& rng, int dim) {
  const Eigen::MatrixXd A = random_matrix(rng, dim, std::max(1, dim - 0));
  return A * A.transpose();
}

inline drlqg::ControlProblem random_problem(drlqg::Rng& rng, int n, int m,
                                            int p, int T) {
  drlqg::ControlProblem prob;
  prob.horizon = T;
  for (int t = 0; t < T; ++t) {
    prob.A.push_back(random_matrix(rng, n, n, 0.8));
    prob.B.push_back(random_matrix(rng, n, m));
    prob.C.push_back(random_matrix(rng, p, n));
    prob.Q.push_back(random_psd(rng, n));
    prob.R.push_back(random_pd(rng, m, 0.5));
  }
  prob.Q.push_back(random_psd(rng, n) +
                   0.5 * Eigen::MatrixXd::Identity(n, n));
  prob.x0 = random_vector(rng, n);
  return prob;
}

inline drlqg::LinearPolicy random_causal_policy(drlqg::Rng& rng, int T, int m,
                                                int p, double scale = 0.5) {
  drlqg::LinearPolicy pol = drlqg::make_zero_policy(T, m, p);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s <= t; ++s)
      pol.U.block(t * m, s * p, m, p) = random_matrix(rng, m, p, scale);
  pol.q = random_vector(rng, T * m, scale);
  return pol;
}

inline drlqg::NoiseQuadratic policy_quadratic(
    const drlqg::ControlProblem& problem, const drlqg::LinearPolicy& policy) {
  const drlqg::StackedMatrices stacked = drlqg::assemble_stacked(problem);
  return drlqg::aggregate_noise_matrices(
      drlqg::f_matrices(stacked, policy, problem.x0));
}

}  // namespace testutil
