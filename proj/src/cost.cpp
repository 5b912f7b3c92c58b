#include "drlqg/cost.hpp"

#include <sstream>

#include "drlqg/errors.hpp"

namespace drlqg {

NoiseMoments reference_moments(const Eigen::MatrixXd& cov_v,
                               const Eigen::MatrixXd& cov_w) {
  NoiseMoments moments;
  moments.mean_v = Eigen::VectorXd::Zero(cov_v.rows());
  moments.cov_v = cov_v;
  moments.mean_w = Eigen::VectorXd::Zero(cov_w.rows());
  moments.cov_w = cov_w;
  return moments;
}

FMatrices f_matrices(const StackedMatrices& stacked, const LinearPolicy& policy,
                     const Eigen::VectorXd& x0) {
  validate_policy(policy);
  if (policy.horizon != stacked.horizon || policy.m != stacked.m ||
      policy.p != stacked.p) {
    std::ostringstream os;
    os << "policy dimensions (T=" << policy.horizon << ", m=" << policy.m
       << ", p=" << policy.p << ") do not match the stacked problem (T="
       << stacked.horizon << ", m=" << stacked.m << ", p=" << stacked.p << ")";
    throw DimensionError(os.str());
  }
  if (x0.size() != stacked.n) {
    std::ostringstream os;
    os << "x0 has length " << x0.size() << ", expected " << stacked.n;
    throw DimensionError(os.str());
  }

  const Eigen::MatrixXd& U = policy.U;
  const Eigen::VectorXd& q = policy.q;
  const Eigen::MatrixXd UD = U * stacked.D;
  // Closed loop: u = U(Dv + w) + q, x = Hu + Gv + Lx0, so the v-channel
  // sees HUD + G and the w-channel HU.
  const Eigen::MatrixXd Xv = stacked.H * UD + stacked.G;   // ∂x/∂v
  const Eigen::MatrixXd Xw = stacked.H * U;                // ∂x/∂w
  const Eigen::VectorXd r = stacked.H * q + stacked.L * x0;  // noise-free x
  const Eigen::MatrixXd QXv = stacked.Q * Xv;
  const Eigen::MatrixXd QXw = stacked.Q * Xw;
  const Eigen::MatrixXd RU = stacked.R * U;

  FMatrices f;
  f.horizon = stacked.horizon;
  f.n = stacked.n;
  f.p = stacked.p;
  f.F1 = UD.transpose() * stacked.R * UD + Xv.transpose() * QXv;
  f.F2 = U.transpose() * RU + Xw.transpose() * QXw;
  f.F3 = 2.0 * (U.transpose() * stacked.R * UD + Xw.transpose() * QXv);
  f.f1 = 2.0 * (UD.transpose() * (stacked.R * q) + Xv.transpose() * (stacked.Q * r));
  f.f2 = 2.0 * (U.transpose() * (stacked.R * q) + Xw.transpose() * (stacked.Q * r));
  f.c0 = q.dot(stacked.R * q) + r.dot(stacked.Q * r);
  return f;
}

double noise_quadratic_value(const FMatrices& f, const Eigen::VectorXd& v,
                             const Eigen::VectorXd& w) {
  return v.dot(f.F1 * v) + w.dot(f.F2 * w) + w.dot(f.F3 * v) + f.f1.dot(v) +
         f.f2.dot(w) + f.c0;
}

NoiseQuadratic aggregate_noise_matrices(const FMatrices& f) {
  const int T = f.horizon;
  const int n = f.n;
  const int p = f.p;
  if (T < 1 || n < 1 || p < 1 || f.F1.rows() != T * n || f.F1.cols() != T * n ||
      f.F2.rows() != T * p || f.F2.cols() != T * p || f.F3.rows() != T * p ||
      f.F3.cols() != T * n || f.f1.size() != T * n || f.f2.size() != T * p)
    throw DimensionError(
        "trajectory quadratic blocks do not match its declared (T, n, p)");

  NoiseQuadratic nq;
  nq.Pv = Eigen::MatrixXd::Zero(n, n);
  nq.Nv = Eigen::MatrixXd::Zero(n, n);
  nq.Pw = Eigen::MatrixXd::Zero(p, p);
  nq.Nw = Eigen::MatrixXd::Zero(p, p);
  nq.S = Eigen::MatrixXd::Zero(p, n);
  nq.nv = Eigen::VectorXd::Zero(n);
  nq.nw = Eigen::VectorXd::Zero(p);
  nq.c0 = f.c0;

  for (int t = 0; t < T; ++t) {
    nq.Pv += f.F1.block(t * n, t * n, n, n);
    nq.Pw += f.F2.block(t * p, t * p, p, p);
    nq.nv += f.f1.segment(t * n, n);
    nq.nw += f.f2.segment(t * p, p);
    for (int s = t + 1; s < T; ++s) {
      nq.Nv += 2.0 * f.F1.block(t * n, s * n, n, n);
      nq.Nw += 2.0 * f.F2.block(t * p, s * p, p, p);
    }
    // Cross blocks couple every (w_t, v_s) pair through the means.
    for (int s = 0; s < T; ++s) nq.S += f.F3.block(t * p, s * n, p, n);
  }
  return nq;
}

double expected_cost(const NoiseQuadratic& nq, const NoiseMoments& moments) {
  const Eigen::VectorXd& mv = moments.mean_v;
  const Eigen::VectorXd& mw = moments.mean_w;
  // mᵀNm picks out the symmetric part of N automatically.
  return (nq.Pv * moments.cov_v).trace() + (nq.Pw * moments.cov_w).trace() +
         mv.dot((nq.Pv + nq.Nv) * mv) + mw.dot((nq.Pw + nq.Nw) * mw) +
         mw.dot(nq.S * mv) + nq.nv.dot(mv) + nq.nw.dot(mw) + nq.c0;
}

}  // namespace drlqg
