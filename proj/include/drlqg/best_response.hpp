#pragma once

#include <Eigen/Dense>
#include <utility>

#include "drlqg/cost.hpp"
#include "drlqg/policy.hpp"
#include "drlqg/problem.hpp"
#include "drlqg/stacked.hpp"

namespace drlqg {

// Minimiser of the expected closed-loop cost over causal affine policies
// u = Uη + q for fixed i.i.d. noise moments.  The objective is a convex
// quadratic in the free (lower-triangular) blocks; the normal equations are
// solved with a rank-revealing decomposition, so directions the noise never
// excites (e.g. under a singular measurement covariance) come back zero
// (minimum-norm solution).
LinearPolicy best_linear_response(const StackedMatrices& stacked,
                                  const NoiseMoments& moments,
                                  const Eigen::VectorXd& x0);

// Gradient of the expected cost at `policy` with respect to (U, q), with the
// acausal (strict upper block) directions projected out.  Vanishes at the
// best response.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> policy_gradient(
    const StackedMatrices& stacked, const NoiseMoments& moments,
    const Eigen::VectorXd& x0, const LinearPolicy& policy);

// Independent optimal-value oracle: Kalman filter covariances plus an
// affine-LQR value recursion on the filtered estimate (handles nonzero noise
// means and singular measurement covariance via pseudo-inverse innovations).
// Equals the best affine purified-output value for the same moments.
double dp_lqg_value(const ControlProblem& problem, const NoiseMoments& moments);

}  // namespace drlqg
