#pragma once

#include <Eigen/Dense>

namespace drlqg {

// First two moments of a distribution on ℝⁿ (the label is by convention —
// every formula below depends on the first two moments only).
struct GaussianSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // symmetric PSD
};

// Validates shapes and PSD-ness (eigenvalues ≥ −1e−12·scale).
void validate_gaussian(const GaussianSpec& g, const char* name = "cov");

// Squared Bures distance between covariances:
//   ell(Σ1, Σ2) = tr(Σ1 + Σ2 − 2 (Σ2^{1/2} Σ1 Σ2^{1/2})^{1/2}) ≥ 0.
double ell(const Eigen::MatrixXd& cov1, const Eigen::MatrixXd& cov2);

// Type-2 Wasserstein distance between Gaussians (Gelbrich bound in general):
//   W2(g1, g2) = sqrt(‖m1 − m2‖² + ell(Σ1, Σ2)).
double gelbrich_distance(const GaussianSpec& g1, const GaussianSpec& g2);

// Moments of the affine pushforward z ↦ A z + b:  (A m + b, A Σ Aᵀ).
GaussianSpec affine_pushforward_moments(const Eigen::MatrixXd& A,
                                        const Eigen::VectorXd& b,
                                        const GaussianSpec& g);

}  // namespace drlqg
