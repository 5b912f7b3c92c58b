#include "drlqg/gauss_ot.hpp"

#include <sstream>

#include "drlqg/errors.hpp"
#include "drlqg/linalg.hpp"

namespace drlqg {

void validate_gaussian(const GaussianSpec& g, const char* name) {
  if (g.cov.rows() != g.cov.cols()) {
    std::ostringstream os;
    os << name << " must be square, got " << g.cov.rows() << "x"
       << g.cov.cols();
    throw DimensionError(os.str());
  }
  if (g.mean.size() != g.cov.rows()) {
    std::ostringstream os;
    os << "mean has length " << g.mean.size() << " but " << name << " is "
       << g.cov.rows() << "x" << g.cov.cols();
    throw DimensionError(os.str());
  }
  require_psd(g.cov, name);
}

double ell(const Eigen::MatrixXd& cov1, const Eigen::MatrixXd& cov2) {
  if (cov1.rows() != cov2.rows() || cov1.cols() != cov2.cols())
    throw DimensionError("covariances must share a common shape");
  require_psd(cov1, "cov1");
  const Eigen::MatrixXd root2 = psd_sqrt(cov2, "cov2");
  // tr((Σ2^{1/2} Σ1 Σ2^{1/2})^{1/2}) = Σ_i sqrt(eig_i) of the congruence.
  const SymEig eig = sym_eig(root2 * cov1 * root2);
  double cross = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    cross += std::sqrt(std::max(eig.values[i], 0.0));
  const double value = cov1.trace() + cov2.trace() - 2.0 * cross;
  // Exact zero at Σ1 = Σ2 up to roundoff; clamp the dust.
  return std::max(value, 0.0);
}

double gelbrich_distance(const GaussianSpec& g1, const GaussianSpec& g2) {
  validate_gaussian(g1, "cov1");
  validate_gaussian(g2, "cov2");
  if (g1.mean.size() != g2.mean.size())
    throw DimensionError("means must share a common length");
  return std::sqrt((g1.mean - g2.mean).squaredNorm() + ell(g1.cov, g2.cov));
}

GaussianSpec affine_pushforward_moments(const Eigen::MatrixXd& A,
                                        const Eigen::VectorXd& b,
                                        const GaussianSpec& g) {
  validate_gaussian(g, "cov");
  if (A.cols() != g.mean.size() || b.size() != A.rows())
    throw DimensionError("pushforward map dimensions do not match the input");
  GaussianSpec out;
  out.mean = A * g.mean + b;
  out.cov = A * g.cov * A.transpose();
  return out;
}

}  // namespace drlqg
