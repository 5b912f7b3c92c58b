#include "drlqg/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>

#include "drlqg/errors.hpp"

namespace drlqg {

SymEig sym_eig(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(M));
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const Eigen::MatrixXd& M) {
  return sym_eig(M).values.minCoeff();
}

double max_eigenvalue(const Eigen::MatrixXd& M) {
  return sym_eig(M).values.maxCoeff();
}

namespace {

double definiteness_scale(const Eigen::MatrixXd& M) {
  return std::max(1.0, M.cwiseAbs().maxCoeff());
}

}  // namespace

void require_psd(const Eigen::MatrixXd& M, const std::string& name,
                 double tol) {
  const double lo = min_eigenvalue(M);
  if (lo < -tol * definiteness_scale(M)) {
    std::ostringstream os;
    os << name << " must be positive semidefinite; minimum eigenvalue " << lo;
    throw DefinitenessError(os.str(), lo);
  }
}

void require_pd(const Eigen::MatrixXd& M, const std::string& name,
                double tol) {
  const double lo = min_eigenvalue(M);
  if (lo <= tol * definiteness_scale(M)) {
    std::ostringstream os;
    os << name << " must be positive definite; minimum eigenvalue " << lo;
    throw DefinitenessError(os.str(), lo);
  }
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& M, const std::string& name,
                         double tol) {
  SymEig eig = sym_eig(M);
  const double floor = -tol * definiteness_scale(M);
  Eigen::VectorXd d = eig.values;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] < floor) {
      std::ostringstream os;
      os << name << " must be positive semidefinite; minimum eigenvalue "
         << d[i];
      throw DefinitenessError(os.str(), d[i]);
    }
    d[i] = std::sqrt(std::max(d[i], 0.0));
  }
  return eig.vectors * d.asDiagonal() * eig.vectors.transpose();
}

Eigen::MatrixXd psd_pinv(const Eigen::MatrixXd& M, double rel_tol) {
  SymEig eig = sym_eig(M);
  const double cutoff = rel_tol * std::max(1e-300, eig.values.cwiseAbs().maxCoeff());
  Eigen::VectorXd d = eig.values;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d[i] = (d[i] > cutoff) ? 1.0 / d[i] : 0.0;
  return eig.vectors * d.asDiagonal() * eig.vectors.transpose();
}

}  // namespace drlqg
