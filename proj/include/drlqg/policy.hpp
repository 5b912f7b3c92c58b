#pragma once

#include <Eigen/Dense>

namespace drlqg {

// Causal affine purified-output feedback  u = U η + q  with U lower block
// triangular in (m × p) blocks: input u_t may depend on η_0..η_t only.
struct LinearPolicy {
  int horizon = 0;  // T
  int m = 0;        // input block size
  int p = 0;        // output block size
  Eigen::MatrixXd U;  // Tm × Tp, lower block triangular
  Eigen::VectorXd q;  // Tm

  Eigen::Block<Eigen::MatrixXd> block(int t, int s) {
    return U.block(t * m, s * p, m, p);
  }
  Eigen::Block<const Eigen::MatrixXd> block(int t, int s) const {
    return U.block(t * m, s * p, m, p);
  }
};

// Zero policy (U = 0, q = 0) of the given dimensions.
LinearPolicy make_zero_policy(int horizon, int m, int p);

// Builds a policy from full (U, q), rejecting any nonzero entry in a strict
// upper block with CausalityError; DimensionError on size mismatch.
LinearPolicy make_policy(int horizon, int m, int p, const Eigen::MatrixXd& U,
                         const Eigen::VectorXd& q);

// Validates an existing policy (shape + causality pattern).
void validate_policy(const LinearPolicy& policy);

}  // namespace drlqg
