#pragma once

#include <Eigen/Dense>

#include "drlqg/policy.hpp"
#include "drlqg/stacked.hpp"

namespace drlqg {

// Closed-loop cost as a quadratic in the stacked noise (v, w):
//
//   J(v, w) = vᵀ F1 v + wᵀ F2 w + wᵀ F3 v + f1ᵀ v + f2ᵀ w + c0.
struct FMatrices {
  int horizon = 0;  // T
  int n = 0, p = 0;
  Eigen::MatrixXd F1;  // Tn × Tn, symmetric
  Eigen::MatrixXd F2;  // Tp × Tp, symmetric
  Eigen::MatrixXd F3;  // Tp × Tn
  Eigen::VectorXd f1;  // Tn
  Eigen::VectorXd f2;  // Tp
  double c0 = 0.0;
};

// Per-step aggregates of the noise quadratic under i.i.d. stationary noise:
//
//   E J = tr(P_v Σ_v) + tr(P_w Σ_w) + m_vᵀ(P_v+N_v)m_v + m_wᵀ(P_w+N_w)m_w
//         + m_wᵀ S m_v + n_vᵀ m_v + n_wᵀ m_w + c0.
//
// P = Σ_t F(t,t);  N = 2 Σ_{t<t'} F(t,t') (not symmetric in general — only
// its symmetric part enters any quadratic form);  S sums every F3 block.
struct NoiseQuadratic {
  Eigen::MatrixXd Pv, Nv;  // n × n
  Eigen::MatrixXd Pw, Nw;  // p × p
  Eigen::MatrixXd S;       // p × n
  Eigen::VectorXd nv;      // n
  Eigen::VectorXd nw;      // p
  double c0 = 0.0;
};

// First two moments of the single-step noise pair (v_t, w_t).
struct NoiseMoments {
  Eigen::VectorXd mean_v;
  Eigen::MatrixXd cov_v;
  Eigen::VectorXd mean_w;
  Eigen::MatrixXd cov_w;
};

NoiseMoments reference_moments(const Eigen::MatrixXd& cov_v,
                               const Eigen::MatrixXd& cov_w);

// Closed-loop noise quadratic of `policy` on the stacked problem with
// initial state x0.  Uses x = H(Uη + q) + Gv + Lx0 and η = Dv + w.
FMatrices f_matrices(const StackedMatrices& stacked, const LinearPolicy& policy,
                     const Eigen::VectorXd& x0);

// Evaluates the quadratic at a concrete stacked noise draw (testing hook).
double noise_quadratic_value(const FMatrices& f, const Eigen::VectorXd& v,
                             const Eigen::VectorXd& w);

// Collapses the trajectory quadratic to per-step aggregates.
NoiseQuadratic aggregate_noise_matrices(const FMatrices& f);

// Expected closed-loop cost under i.i.d. noise with the given moments.
double expected_cost(const NoiseQuadratic& nq, const NoiseMoments& moments);

}  // namespace drlqg
