#pragma once

#include <Eigen/Dense>
#include <vector>

namespace drlqg {

// Finite-horizon partially observed linear-quadratic control problem
//
//   x_{t+1} = A_t x_t + B_t u_t + v_t,   y_t = C_t x_t + w_t,  t = 0..T−1
//   J = E[ x_Tᵀ Q_T x_T + Σ_{t<T} ( x_tᵀ Q_t x_t + u_tᵀ R_t u_t ) ]
//
// with deterministic initial state x0.  A, B, C, R hold T entries
// (t = 0..T−1); Q holds T+1 entries (t = 0..T).
struct ControlProblem {
  int horizon = 0;  // T ≥ 1
  std::vector<Eigen::MatrixXd> A;  // n×n
  std::vector<Eigen::MatrixXd> B;  // n×m
  std::vector<Eigen::MatrixXd> C;  // p×n
  std::vector<Eigen::MatrixXd> Q;  // n×n, symmetric PSD
  std::vector<Eigen::MatrixXd> R;  // m×m, symmetric PD
  Eigen::VectorXd x0;              // n

  int state_dim() const { return A.empty() ? 0 : static_cast<int>(A[0].rows()); }
  int input_dim() const { return B.empty() ? 0 : static_cast<int>(B[0].cols()); }
  int output_dim() const { return C.empty() ? 0 : static_cast<int>(C[0].rows()); }
};

// Convenience constructor for time-invariant data: replicates (A, B, C, R)
// across t = 0..T−1 and Q across t = 0..T (terminal weight included).
ControlProblem make_time_invariant_problem(
    int horizon, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
    const Eigen::MatrixXd& C, const Eigen::MatrixXd& Q,
    const Eigen::MatrixXd& R, const Eigen::VectorXd& x0);

// Checks counts, cross-timestep shape consistency, Q_t ⪰ 0, R_t ≻ 0.
// Throws DimensionError / DefinitenessError naming the offending matrix
// and time index.
void validate_problem(const ControlProblem& problem);

// State transition product A_s^t = A_{t−1}·A_{t−2}···A_s for s < t and the
// identity for s ≥ t (s, t in [0, T]).  Throws DimensionError when the
// indices fall outside the horizon.
Eigen::MatrixXd state_transition_product(const ControlProblem& problem, int s,
                                         int t);

}  // namespace drlqg
