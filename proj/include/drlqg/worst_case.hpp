#pragma once

#include <Eigen/Dense>
#include <utility>

#include "drlqg/cost.hpp"

namespace drlqg {

// Wasserstein ambiguity: each noise channel ranges over a type-2 ball of
// the given radius centred at a zero-mean reference with PD covariance.
struct AmbiguitySpec {
  Eigen::MatrixXd cov_v_ref;  // Σ̂_v, n × n, positive definite
  Eigen::MatrixXd cov_w_ref;  // Σ̂_w, p × p, positive definite
  double rho_v = 0.0;
  double rho_w = 0.0;
};

struct SolverOptions {
  double tolerance = 1e-10;     // residual scale for convergence
  int max_iter = 200;           // outer multiplier iterations
  double bracket_factor = 2.0;  // upper-bracket expansion
};

struct WorstCaseResiduals {
  double radius_v = 0.0;       // radius-equation residual, v channel
  double radius_w = 0.0;       // radius-equation residual, w channel
  double mean_system = 0.0;    // stationarity residual of the joint mean system
  double certificate = 0.0;    // eigmin of the joint mean-system matrix
                               // (≥ −tol certifies a global maximum)
  double cost_consistency = 0.0;  // |cost − expected_cost| / (1 + |cost|)
};

// Worst-case noise distribution for a fixed policy's noise quadratic.
// Per channel the maximiser is the affine pushforward of the reference,
//   z ↦ (I − P/λ)^{-1} z + m,  Σ = (I − P/λ)^{-1} Σ̂ (I − P/λ)^{-1},
// with multiplier λ > λmax(P) picked so the moments sit on the ball
// boundary.  λ is +inf (formally) for a radius-zero channel and 0 for an
// inert channel (one whose distribution cannot affect the cost).
struct WorstCaseSolution {
  double lambda_v = 0.0;
  double lambda_w = 0.0;
  NoiseMoments moments;
  double cost_core = 0.0;  // Σ_ch [ λρ² + λ·tr(Σ̂ P (λI−P)^{-1}) + mᵀn/2 ]
  double cost = 0.0;       // cost_core + c0
  WorstCaseResiduals residuals;
  int iterations = 0;
};

// Stationarity system for the worst-case means at fixed multipliers:
//
//   [ λ_v I − P_v − sym(N_v)    −Sᵀ/2              ] [m_v]   [n_v/2]
//   [ −S/2                      λ_w I − P_w − sym(N_w)] [m_w] = [n_w/2]
//
// Requires λ_v > λmax(P_v), λ_w > λmax(P_w).  Throws SingularSystemError
// (carrying the smallest singular value) when the matrix is numerically
// singular.
std::pair<Eigen::VectorXd, Eigen::VectorXd> mean_system_solve(
    const NoiseQuadratic& nq, double lambda_v, double lambda_w);

// Residual of the radius equation for one channel:
//   tr(Σ̂ P² (λI − P)^{-2}) + ‖m‖² − ρ².
// λ must exceed λmax(P) strictly.
double radius_residual(const Eigen::MatrixXd& P, const Eigen::MatrixXd& cov_ref,
                       double lambda, const Eigen::VectorXd& mean, double rho);

// Solves both channels' multiplier/mean equations (coupled through the mean
// system when S ≠ 0) by safeguarded bisection with a damped-alternation
// outer loop and a 2-variable Newton fallback.  ConvergenceError on budget
// exhaustion carries the final residual.
WorstCaseSolution solve_worst_case(const NoiseQuadratic& nq,
                                   const AmbiguitySpec& amb,
                                   const SolverOptions& opts = {});

// Residuals of the fixed-point characterisation at a solution: the mean
// stationarity system, the covariance pushforward identity, and boundary
// membership of the returned moments.  Used as an independent check.
struct FirstOrderReport {
  double mean_residual = 0.0;
  double cov_residual = 0.0;
  double boundary_residual = 0.0;
  double max_residual() const;
};

FirstOrderReport verify_first_order(const WorstCaseSolution& solution,
                                    const NoiseQuadratic& nq,
                                    const AmbiguitySpec& amb);

}  // namespace drlqg
