#include "drlqg/problem.hpp"

#include <sstream>

#include "drlqg/errors.hpp"
#include "drlqg/linalg.hpp"

namespace drlqg {

namespace {

void check_shape(const Eigen::MatrixXd& M, Eigen::Index rows,
                 Eigen::Index cols, const char* name, int t) {
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream os;
    os << name << "[" << t << "] has shape " << M.rows() << "x" << M.cols()
       << ", expected " << rows << "x" << cols;
    throw DimensionError(os.str());
  }
}

}  // namespace

ControlProblem make_time_invariant_problem(
    int horizon, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
    const Eigen::MatrixXd& C, const Eigen::MatrixXd& Q,
    const Eigen::MatrixXd& R, const Eigen::VectorXd& x0) {
  ControlProblem p;
  p.horizon = horizon;
  const std::size_t T = horizon > 0 ? static_cast<std::size_t>(horizon) : 0;
  p.A.assign(T, A);
  p.B.assign(T, B);
  p.C.assign(T, C);
  p.Q.assign(T + 1, Q);
  p.R.assign(T, R);
  p.x0 = x0;
  return p;
}

void validate_problem(const ControlProblem& problem) {
  const int T = problem.horizon;
  if (T < 1) throw DimensionError("horizon must be at least 1");

  auto count = [&](std::size_t have, std::size_t want, const char* name) {
    if (have != want) {
      std::ostringstream os;
      os << name << " holds " << have << " matrices, expected " << want
         << " for horizon " << T;
      throw DimensionError(os.str());
    }
  };
  count(problem.A.size(), T, "A");
  count(problem.B.size(), T, "B");
  count(problem.C.size(), T, "C");
  count(problem.Q.size(), T + 1, "Q");
  count(problem.R.size(), T, "R");

  const Eigen::Index n = problem.A[0].rows();
  const Eigen::Index m = problem.B[0].cols();
  const Eigen::Index p = problem.C[0].rows();
  if (n < 1) throw DimensionError("state dimension must be at least 1");
  if (m < 1) throw DimensionError("input dimension must be at least 1");
  if (p < 1) throw DimensionError("output dimension must be at least 1");

  for (int t = 0; t < T; ++t) {
    check_shape(problem.A[t], n, n, "A", t);
    check_shape(problem.B[t], n, m, "B", t);
    check_shape(problem.C[t], p, n, "C", t);
    check_shape(problem.R[t], m, m, "R", t);
  }
  for (int t = 0; t <= T; ++t) check_shape(problem.Q[t], n, n, "Q", t);
  if (problem.x0.size() != n) {
    std::ostringstream os;
    os << "x0 has length " << problem.x0.size() << ", expected " << n;
    throw DimensionError(os.str());
  }

  for (int t = 0; t <= T; ++t) {
    std::ostringstream name;
    name << "Q[" << t << "]";
    require_psd(problem.Q[t], name.str());
  }
  for (int t = 0; t < T; ++t) {
    std::ostringstream name;
    name << "R[" << t << "]";
    require_pd(problem.R[t], name.str());
  }
}

Eigen::MatrixXd state_transition_product(const ControlProblem& problem, int s,
                                         int t) {
  const int T = problem.horizon;
  if (s < 0 || t < 0 || s > T || t > T) {
    std::ostringstream os;
    os << "state transition indices (s=" << s << ", t=" << t
       << ") outside horizon [0, " << T << "]";
    throw DimensionError(os.str());
  }
  const Eigen::Index n = problem.A[0].rows();
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(n, n);
  // A_s^t = A_{t−1}···A_s (identity when s ≥ t).
  for (int k = t - 1; k >= s; --k) prod = prod * problem.A[k];
  return prod;
}

}  // namespace drlqg
