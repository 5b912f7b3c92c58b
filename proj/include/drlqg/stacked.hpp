#pragma once

#include <Eigen/Dense>

#include "drlqg/problem.hpp"

namespace drlqg {

// Trajectory-stacked form of a ControlProblem.  With stacked noise
// v = (v_0..v_{T−1}), w = (w_0..w_{T−1}), inputs u = (u_0..u_{T−1}) and the
// state trajectory x = (x_0..x_T):
//
//   x = H u + G v + L x0              (dynamics unrolled)
//   η = D v + w                       (purified outputs, η_t = y_t − ŷ_t)
//   J = xᵀ Q x + uᵀ R u
//
// Block structure (A_s^t = A_{t−1}···A_s, identity for s ≥ t):
//   G(t, s) = A_{s+1}^t        for s < t, else 0      ((T+1)n × Tn)
//   H(t, s) = A_{s+1}^t B_s    for s < t, else 0      ((T+1)n × Tm)
//   L(t)    = A_0^t                                   ((T+1)n × n)
//   C(t, t) = C_t, trailing zero block column         (Tp × (T+1)n)
//   D       = C·G, strictly lower block triangular    (Tp × Tn)
//   Q = diag(Q_0..Q_T), R = diag(R_0..R_{T−1})
struct StackedMatrices {
  int horizon = 0;  // T
  int n = 0, m = 0, p = 0;
  Eigen::MatrixXd G, H, L, C, D, Q, R;
};

// Builds the stacked matrices.  Validates the problem first.
StackedMatrices assemble_stacked(const ControlProblem& problem);

}  // namespace drlqg
