#pragma once

#include <Eigen/Dense>
#include <string>

namespace drlqg {

// Symmetric part: (M + Mᵀ)/2.
inline Eigen::MatrixXd sym(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

// Eigendecomposition of the symmetric part of M.
struct SymEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

SymEig sym_eig(const Eigen::MatrixXd& M);

double min_eigenvalue(const Eigen::MatrixXd& M);
double max_eigenvalue(const Eigen::MatrixXd& M);

// Throws DefinitenessError unless sym(M) has all eigenvalues ≥ −tol
// (PSD) or > tol (PD). `name` labels the matrix in the message.
void require_psd(const Eigen::MatrixXd& M, const std::string& name,
                 double tol = 1e-12);
void require_pd(const Eigen::MatrixXd& M, const std::string& name,
                double tol = 1e-12);

// Symmetric PSD square root.  Eigenvalues in [−tol·scale, 0) are clamped
// to zero; anything below that throws DefinitenessError.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& M, const std::string& name,
                         double tol = 1e-12);

// Moore–Penrose pseudo-inverse of a symmetric PSD matrix (eigenvalues below
// rel_tol·λmax are treated as zero).
Eigen::MatrixXd psd_pinv(const Eigen::MatrixXd& M, double rel_tol = 1e-12);

}  // namespace drlqg
