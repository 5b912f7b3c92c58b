#include "drlqg/stacked.hpp"

namespace drlqg {

StackedMatrices assemble_stacked(const ControlProblem& problem) {
  validate_problem(problem);

  const int T = problem.horizon;
  const int n = problem.state_dim();
  const int m = problem.input_dim();
  const int p = problem.output_dim();

  StackedMatrices s;
  s.horizon = T;
  s.n = n;
  s.m = m;
  s.p = p;
  s.G = Eigen::MatrixXd::Zero((T + 1) * n, T * n);
  s.H = Eigen::MatrixXd::Zero((T + 1) * n, T * m);
  s.L = Eigen::MatrixXd::Zero((T + 1) * n, n);
  s.C = Eigen::MatrixXd::Zero(T * p, (T + 1) * n);
  s.Q = Eigen::MatrixXd::Zero((T + 1) * n, (T + 1) * n);
  s.R = Eigen::MatrixXd::Zero(T * m, T * m);

  // Row t of G/H holds the transition products A_{q+1}^t (and A_{q+1}^t B_q)
  // for q < t; row t of L is A_0^t.  Dense products are cheap at desk scale.
  for (int t = 0; t <= T; ++t) {
    s.L.block(t * n, 0, n, n) = state_transition_product(problem, 0, t);
    for (int q = 0; q < t; ++q) {
      const Eigen::MatrixXd Phi = state_transition_product(problem, q + 1, t);
      s.G.block(t * n, q * n, n, n) = Phi;
      s.H.block(t * n, q * m, n, m) = Phi * problem.B[q];
    }
  }
  for (int t = 0; t < T; ++t) {
    s.C.block(t * p, t * n, p, n) = problem.C[t];
    s.Q.block(t * n, t * n, n, n) = problem.Q[t];
    s.R.block(t * m, t * m, m, m) = problem.R[t];
  }
  s.Q.block(T * n, T * n, n, n) = problem.Q[T];

  // η = C x − C x̂ = C (G v) + w = D v + w with D strictly lower triangular:
  // measurement t sees process noise up to t−1 only.
  s.D = s.C * s.G;
  return s;
}

}  // namespace drlqg
