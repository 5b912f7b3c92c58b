#include "drlqg/best_response.hpp"

#include <sstream>

#include "drlqg/errors.hpp"
#include "drlqg/linalg.hpp"

namespace drlqg {

namespace {

// Iterates the free (causal) entries of U in a fixed order, reporting the
// flat parameter index alongside the global (row, col) position.
template <typename F>
void for_each_free_entry(int T, int m, int p, F&& fn) {
  int idx = 0;
  for (int t = 0; t < T; ++t)
    for (int s = 0; s <= t; ++s)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < p; ++j) fn(idx++, t * m + i, s * p + j);
}

int free_u_params(int T, int m, int p) { return m * p * T * (T + 1) / 2; }

void check_moments(const StackedMatrices& stacked, const NoiseMoments& moments,
                   const Eigen::VectorXd& x0) {
  if (moments.mean_v.size() != stacked.n || moments.cov_v.rows() != stacked.n ||
      moments.cov_v.cols() != stacked.n || moments.mean_w.size() != stacked.p ||
      moments.cov_w.rows() != stacked.p || moments.cov_w.cols() != stacked.p) {
    std::ostringstream os;
    os << "noise moments do not match the problem dimensions (n=" << stacked.n
       << ", p=" << stacked.p << ")";
    throw DimensionError(os.str());
  }
  if (x0.size() != stacked.n) {
    std::ostringstream os;
    os << "x0 has length " << x0.size() << ", expected " << stacked.n;
    throw DimensionError(os.str());
  }
  require_psd(moments.cov_v, "cov_v");
  require_psd(moments.cov_w, "cov_w");
}

// Data defining the expected cost as a quadratic in (U, q):
//   J = tr(W U M_ηη Uᵀ) + 2qᵀW U m̄_η + qᵀWq
//       + 2 tr(Uᵀ lin_U) + 2 qᵀ lin_q + const.
struct ResponseContext {
  Eigen::MatrixXd W;      // R + HᵀQH ≻ 0
  Eigen::MatrixXd Meta;   // E[ηηᵀ] over the trajectory
  Eigen::VectorXd meta;   // E[η]
  Eigen::MatrixXd lin_U;  // HᵀQG·E[vηᵀ] + HᵀQLx̄·E[η]ᵀ
  Eigen::VectorXd lin_q;  // HᵀQ(G m̄_v + L x̄)
};

ResponseContext make_context(const StackedMatrices& stacked,
                             const NoiseMoments& moments,
                             const Eigen::VectorXd& x0) {
  const int T = stacked.horizon;
  const int n = stacked.n;
  const int p = stacked.p;

  // Stationary noise lifts to block-constant means and block-diagonal
  // covariances over the trajectory.
  Eigen::VectorXd mbar_v = moments.mean_v.replicate(T, 1);
  Eigen::VectorXd mbar_w = moments.mean_w.replicate(T, 1);
  Eigen::MatrixXd Sbar_v = Eigen::MatrixXd::Zero(T * n, T * n);
  Eigen::MatrixXd Sbar_w = Eigen::MatrixXd::Zero(T * p, T * p);
  for (int t = 0; t < T; ++t) {
    Sbar_v.block(t * n, t * n, n, n) = moments.cov_v;
    Sbar_w.block(t * p, t * p, p, p) = moments.cov_w;
  }

  ResponseContext ctx;
  ctx.meta = stacked.D * mbar_v + mbar_w;
  ctx.Meta = stacked.D * Sbar_v * stacked.D.transpose() + Sbar_w +
             ctx.meta * ctx.meta.transpose();
  const Eigen::MatrixXd Mveta =
      Sbar_v * stacked.D.transpose() + mbar_v * ctx.meta.transpose();
  const Eigen::MatrixXd HtQ = stacked.H.transpose() * stacked.Q;
  ctx.W = stacked.R + HtQ * stacked.H;
  const Eigen::VectorXd r0 = stacked.L * x0;
  ctx.lin_U = HtQ * stacked.G * Mveta + (HtQ * r0) * ctx.meta.transpose();
  ctx.lin_q = HtQ * (stacked.G * mbar_v + r0);
  return ctx;
}

}  // namespace

LinearPolicy best_linear_response(const StackedMatrices& stacked,
                                  const NoiseMoments& moments,
                                  const Eigen::VectorXd& x0) {
  check_moments(stacked, moments, x0);
  const int T = stacked.horizon;
  const int m = stacked.m;
  const int p = stacked.p;
  const ResponseContext ctx = make_context(stacked, moments, x0);

  const int nU = free_u_params(T, m, p);
  const int total = nU + T * m;

  // Gradient at (U, q) = 0, restricted to the free coordinates.
  Eigen::VectorXd g0(total);
  for_each_free_entry(T, m, p, [&](int idx, int row, int col) {
    g0[idx] = 2.0 * ctx.lin_U(row, col);
  });
  g0.tail(T * m) = 2.0 * ctx.lin_q;

  // Hessian columns are images of basis directions under the linear part of
  // the gradient map; a U-basis element e_a e_bᵀ maps to the outer product
  // 2 W.col(a) · Meta.row(b) (plus the q-coupling through m̄_η).
  Eigen::MatrixXd hess(total, total);
  for_each_free_entry(T, m, p, [&](int jdx, int a, int b) {
    Eigen::VectorXd col(total);
    const auto Wa = ctx.W.col(a);
    for_each_free_entry(T, m, p, [&](int idx, int row, int colU) {
      col[idx] = 2.0 * Wa[row] * ctx.Meta(b, colU);
    });
    col.tail(T * m) = 2.0 * ctx.meta[b] * Wa;
    hess.col(jdx) = col;
  });
  for (int a = 0; a < T * m; ++a) {
    Eigen::VectorXd col(total);
    const auto Wa = ctx.W.col(a);
    for_each_free_entry(T, m, p, [&](int idx, int row, int colU) {
      col[idx] = 2.0 * Wa[row] * ctx.meta[colU];
    });
    col.tail(T * m) = 2.0 * Wa;
    hess.col(nU + a) = col;
  }

  // The Hessian is PSD but can be singular (noise components the policy
  // never observes); the rank-revealing solve returns the minimum-norm
  // stationary point, zeroing the unidentified directions.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sym(hess));
  const Eigen::VectorXd theta = cod.solve(-g0);
  const double residual = (hess * theta + g0).norm();
  if (residual > 1e-8 * (1.0 + g0.norm()))
    throw ConvergenceError("best-response normal equations left a residual",
                           residual);

  LinearPolicy policy = make_zero_policy(T, m, p);
  for_each_free_entry(T, m, p, [&](int idx, int row, int col) {
    policy.U(row, col) = theta[idx];
  });
  policy.q = theta.tail(T * m);
  return policy;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> policy_gradient(
    const StackedMatrices& stacked, const NoiseMoments& moments,
    const Eigen::VectorXd& x0, const LinearPolicy& policy) {
  check_moments(stacked, moments, x0);
  validate_policy(policy);
  if (policy.horizon != stacked.horizon || policy.m != stacked.m ||
      policy.p != stacked.p)
    throw DimensionError("policy dimensions do not match the stacked problem");
  const ResponseContext ctx = make_context(stacked, moments, x0);

  Eigen::MatrixXd grad_U =
      2.0 * (ctx.W * policy.U * ctx.Meta + (ctx.W * policy.q) * ctx.meta.transpose() +
             ctx.lin_U);
  // Acausal directions are not part of the feasible set.
  for (int t = 0; t < policy.horizon; ++t)
    for (int s = t + 1; s < policy.horizon; ++s)
      grad_U.block(t * policy.m, s * policy.p, policy.m, policy.p).setZero();
  Eigen::VectorXd grad_q =
      2.0 * (ctx.W * (policy.q + policy.U * ctx.meta) + ctx.lin_q);
  return {grad_U, grad_q};
}

double dp_lqg_value(const ControlProblem& problem,
                    const NoiseMoments& moments) {
  validate_problem(problem);
  const int T = problem.horizon;
  const int n = problem.state_dim();
  const int p = problem.output_dim();
  if (moments.mean_v.size() != n || moments.cov_v.rows() != n ||
      moments.mean_w.size() != p || moments.cov_w.rows() != p)
    throw DimensionError("noise moments do not match the problem dimensions");
  require_psd(moments.cov_v, "cov_v");
  require_psd(moments.cov_w, "cov_w");

  // Forward pass: Kalman covariances.  x0 is known exactly, so the filter
  // starts from zero covariance; singular innovation covariances (e.g. a
  // noise-free measurement) go through the pseudo-inverse.
  Eigen::MatrixXd P_pred = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::MatrixXd> Xi(T);  // filter-update noise covariances
  double est_cost = 0.0;
  for (int t = 0; t < T; ++t) {
    const Eigen::MatrixXd& C = problem.C[t];
    const Eigen::MatrixXd S = sym(C * P_pred * C.transpose() + moments.cov_w);
    const Eigen::MatrixXd K = P_pred * C.transpose() * psd_pinv(S);
    Xi[t] = sym(K * S * K.transpose());
    const Eigen::MatrixXd P_filt = sym(P_pred - Xi[t]);
    est_cost += (problem.Q[t] * P_filt).trace();
    P_pred = sym(problem.A[t] * P_filt * problem.A[t].transpose() +
                 moments.cov_v);
  }
  est_cost += (problem.Q[T] * P_pred).trace();

  // Backward pass: affine value recursion V_t(z) = zᵀΠz + 2βᵀz + γ on the
  // filtered estimate dynamics ẑ⁺ = Aẑ + Bu + m_v + ξ, ξ ~ (0, Ξ).
  const Eigen::VectorXd& mv = moments.mean_v;
  Eigen::MatrixXd Pi = problem.Q[T];
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  double gamma = 0.0;
  for (int t = T - 1; t >= 0; --t) {
    const Eigen::MatrixXd& A = problem.A[t];
    const Eigen::MatrixXd& B = problem.B[t];
    const Eigen::MatrixXd W = sym(problem.R[t] + B.transpose() * Pi * B);
    const auto Wldlt = W.ldlt();
    const Eigen::VectorXd drift = Pi * mv + beta;
    const Eigen::VectorXd h = B.transpose() * drift;
    const Eigen::MatrixXd F = Wldlt.solve(B.transpose() * Pi * A);
    const Eigen::MatrixXd Xi_next =
        (t + 1 < T) ? Xi[t + 1] : Eigen::MatrixXd::Zero(n, n).eval();
    gamma += (Pi * Xi_next).trace() + mv.dot(Pi * mv) + 2.0 * beta.dot(mv) -
             h.dot(Wldlt.solve(h));
    beta = (A - B * F).transpose() * drift;
    Pi = sym(problem.Q[t] + A.transpose() * Pi * A -
             A.transpose() * Pi * B * F);
  }
  // z_0 = x0 + K_0 e_0; with P_{0|−1} = 0 the update term vanishes, but it
  // is kept for generality.
  return problem.x0.dot(Pi * problem.x0) + 2.0 * beta.dot(problem.x0) + gamma +
         (Pi * Xi[0]).trace() + est_cost;
}

}  // namespace drlqg
