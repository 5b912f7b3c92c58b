#include "drlqg/worst_case.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "drlqg/errors.hpp"
#include "drlqg/gauss_ot.hpp"
#include "drlqg/linalg.hpp"

namespace drlqg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_quadratic_shapes(const NoiseQuadratic& nq, int n, int p) {
  auto expect = [](const Eigen::MatrixXd& M, int rows, int cols,
                   const char* name) {
    if (M.rows() != rows || M.cols() != cols) {
      std::ostringstream os;
      os << name << " has shape " << M.rows() << "x" << M.cols()
         << ", expected " << rows << "x" << cols;
      throw DimensionError(os.str());
    }
  };
  expect(nq.Pv, n, n, "Pv");
  expect(nq.Nv, n, n, "Nv");
  expect(nq.Pw, p, p, "Pw");
  expect(nq.Nw, p, p, "Nw");
  expect(nq.S, p, n, "S");
  if (nq.nv.size() != n || nq.nw.size() != p)
    throw DimensionError("linear coefficients do not match the block sizes");
}

// Solves Mx = b by SVD; nullopt when M is numerically singular.
std::optional<Eigen::VectorXd> svd_solve(const Eigen::MatrixXd& M,
                                         const Eigen::VectorXd& b,
                                         double* smallest_sv = nullptr) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const double lo = svd.singularValues().minCoeff();
  const double hi = svd.singularValues().maxCoeff();
  if (smallest_sv) *smallest_sv = lo;
  if (!(lo > 1e-12 * std::max(hi, 1e-300))) return std::nullopt;
  return svd.solve(b);
}

// Per-channel state for the multiplier/mean equations.
struct Channel {
  enum class Mode { Active, Pinned, Inert };

  std::string label;
  Eigen::MatrixXd P;       // sym(P): quadratic mass on this channel
  Eigen::MatrixXd Lam;     // P + sym(N): curvature of the mean objective
  Eigen::MatrixXd cov_ref; // Σ̂
  Eigen::VectorXd n_half;  // n/2
  double rho = 0.0;

  SymEig peig;             // eigendecomposition of P
  Eigen::VectorXd sigma;   // σ_i = u_iᵀ Σ̂ u_i
  double pmax = 0.0;       // λmax(P)
  double lam_max = 0.0;    // λmax(Λ)
  double lambda_lb = 0.0;  // open lower bracket for λ

  Mode mode = Mode::Active;
  bool resonant = false;
  double lambda = 0.0;
  Eigen::VectorXd mean;

  int dim() const { return static_cast<int>(P.rows()); }
  bool free() const { return mode == Mode::Active && !resonant; }

  // tr(Σ̂ P² (λI−P)^{-2}): covariance share of the squared radius.
  double trace2(double lam) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      const double pi = peig.values[i];
      const double d = lam - pi;
      acc += sigma[i] * pi * pi / (d * d);
    }
    return acc;
  }

  // tr(Σ̂ P (λI−P)^{-1}): trace term of the dual value.
  double trace1(double lam) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      const double pi = peig.values[i];
      acc += sigma[i] * pi / (lam - pi);
    }
    return acc;
  }

  // (I − P/λ)^{-1} = λ(λI−P)^{-1}; identity off the active branch.
  Eigen::MatrixXd pushforward_map() const {
    if (mode != Mode::Active)
      return Eigen::MatrixXd::Identity(dim(), dim());
    Eigen::VectorXd d(sigma.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
      d[i] = lambda / (lambda - peig.values[i]);
    return peig.vectors * d.asDiagonal() * peig.vectors.transpose();
  }
};

Channel make_channel(const std::string& label, const Eigen::MatrixXd& P_raw,
                     const Eigen::MatrixXd& N_raw,
                     const Eigen::MatrixXd& cov_ref,
                     const Eigen::VectorXd& n_vec, double rho) {
  Channel ch;
  ch.label = label;
  ch.P = sym(P_raw);
  ch.Lam = ch.P + sym(N_raw);
  ch.cov_ref = cov_ref;
  ch.n_half = 0.5 * n_vec;
  ch.rho = rho;
  ch.peig = sym_eig(ch.P);
  ch.sigma.resize(ch.peig.values.size());
  for (Eigen::Index i = 0; i < ch.sigma.size(); ++i) {
    const Eigen::VectorXd u = ch.peig.vectors.col(i);
    ch.sigma[i] = u.dot(cov_ref * u);
  }
  ch.pmax = ch.peig.values.maxCoeff();
  ch.lam_max = max_eigenvalue(ch.Lam);
  // λ must clear both λmax(P) (pushforward pole) and λmax(Λ) (mean
  // stationarity must be a maximum, not a saddle).
  const double base = std::max(ch.pmax, ch.lam_max);
  ch.lambda_lb = base * (1.0 + 1e-10) + 1e-14;
  ch.mean = Eigen::VectorXd::Zero(ch.dim());
  return ch;
}

class WorstCaseSolver {
 public:
  WorstCaseSolver(const NoiseQuadratic& nq, const AmbiguitySpec& amb,
                  const SolverOptions& opts)
      : nq_(nq), amb_(amb), opts_(opts) {}

  WorstCaseSolution run();

 private:
  const NoiseQuadratic& nq_;
  const AmbiguitySpec& amb_;
  SolverOptions opts_;
  Channel v_, w_;
  bool converged_ = false;
  int rounds_ = 0;

  Eigen::VectorXd coupling_into(const Channel& ch,
                                const Eigen::VectorXd& other_mean) const {
    // Row for m_v carries −Sᵀ m_w / 2; row for m_w carries −S m_v / 2.
    if (&ch == &v_) return 0.5 * nq_.S.transpose() * other_mean;
    return 0.5 * nq_.S * other_mean;
  }

  std::optional<Eigen::VectorXd> reduced_mean(const Channel& ch, double lam,
                                              const Eigen::VectorXd& rhs) const {
    const Eigen::MatrixXd M =
        lam * Eigen::MatrixXd::Identity(ch.dim(), ch.dim()) - ch.Lam;
    return svd_solve(M, rhs);
  }

  double channel_residual(const Channel& ch, double lam,
                          const Eigen::VectorXd& rhs_eff) const {
    const auto m = reduced_mean(ch, lam, rhs_eff);
    // A near-singular mean system sends ‖m‖ → ∞, i.e. the residual is +∞
    // on that side of the bracket.
    if (!m) return kInf;
    return ch.trace2(lam) + m->squaredNorm() - ch.rho * ch.rho;
  }

  void solve_channel(Channel& ch, const Channel& other);
  bool joint_refresh();
  void joint_residuals(double lv, double lw, double* rv, double* rw) const;
  void newton_polish();
  WorstCaseSolution finalize() const;
};

void WorstCaseSolver::solve_channel(Channel& ch, const Channel& other) {
  const Eigen::VectorXd rhs_eff = ch.n_half + coupling_into(ch, other.mean);
  double lo = ch.lambda_lb;
  double r_lo = channel_residual(ch, lo, rhs_eff);

  if (!(r_lo > 0.0)) {
    // Hard case: the radius cannot be exhausted on the open interval.
    const double curvature_gap = ch.lam_max - ch.pmax;
    const double scale = std::max(1.0, ch.Lam.cwiseAbs().maxCoeff());
    if (rhs_eff.norm() <= 1e-10 * scale && curvature_gap > 1e-12 * scale) {
      // Resonance: λ pins to λmax(Λ) and the mean jumps into the top
      // eigenspace, sized to land exactly on the ball boundary.
      const double lam = ch.lam_max;
      const Eigen::MatrixXd M =
          lam * Eigen::MatrixXd::Identity(ch.dim(), ch.dim()) - ch.Lam;
      const Eigen::VectorXd m_part = psd_pinv(M, 1e-10) * rhs_eff;
      const double budget =
          std::max(ch.rho * ch.rho - ch.trace2(lam) - m_part.squaredNorm(), 0.0);
      const SymEig leig = sym_eig(ch.Lam);
      const Eigen::VectorXd top = leig.vectors.col(ch.dim() - 1);
      const Eigen::VectorXd step = std::sqrt(budget) * top;
      auto objective = [&](const Eigen::VectorXd& m) {
        return m.dot(ch.Lam * m) + 2.0 * rhs_eff.dot(m);
      };
      const Eigen::VectorXd plus = m_part + step;
      const Eigen::VectorXd minus = m_part - step;
      ch.mean = objective(plus) >= objective(minus) ? plus : minus;
      ch.lambda = lam;
      ch.resonant = true;
      return;
    }
    if (ch.P.isZero(0.0) && ch.Lam.isZero(0.0) &&
        rhs_eff.norm() <= 1e-12) {
      // The channel cannot influence the cost at this solution; fall back
      // to the reference distribution.
      ch.mode = Channel::Mode::Inert;
      ch.lambda = 0.0;
      ch.mean.setZero();
      return;
    }
    throw ConvergenceError(
        "radius equation for the " + ch.label +
            " channel has no root above the spectral lower bound",
        r_lo);
  }

  // Bracket: expand upward until the residual turns negative (it tends to
  // −ρ² as λ → ∞), then bisect.
  double hi = lo + std::max(1.0, std::abs(lo));
  double r_hi = channel_residual(ch, hi, rhs_eff);
  int expansions = 0;
  while (r_hi > 0.0) {
    if (++expansions > 400)
      throw ConvergenceError(
          "failed to bracket the radius equation for the " + ch.label +
              " channel",
          r_hi);
    hi = lo + (hi - lo) * opts_.bracket_factor;
    r_hi = channel_residual(ch, hi, rhs_eff);
  }
  for (int it = 0; it < 260 && (hi - lo) > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (channel_residual(ch, mid, rhs_eff) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  ch.lambda = 0.5 * (lo + hi);
  if (const auto m = reduced_mean(ch, ch.lambda, rhs_eff)) ch.mean = *m;
}

// Re-solves the mean stationarity system jointly at the current multipliers
// so both means are mutually consistent.  Frozen (resonant/pinned/inert)
// means enter as data.  Returns false when the system is singular.
bool WorstCaseSolver::joint_refresh() {
  const bool v_free = v_.free();
  const bool w_free = w_.free();
  if (v_free && w_free) {
    const int n = v_.dim(), p = w_.dim();
    Eigen::MatrixXd M(n + p, n + p);
    M.topLeftCorner(n, n) =
        v_.lambda * Eigen::MatrixXd::Identity(n, n) - v_.Lam;
    M.bottomRightCorner(p, p) =
        w_.lambda * Eigen::MatrixXd::Identity(p, p) - w_.Lam;
    M.topRightCorner(n, p) = -0.5 * nq_.S.transpose();
    M.bottomLeftCorner(p, n) = -0.5 * nq_.S;
    Eigen::VectorXd rhs(n + p);
    rhs << v_.n_half, w_.n_half;
    const auto m = svd_solve(M, rhs);
    if (!m) return false;
    v_.mean = m->head(n);
    w_.mean = m->tail(p);
    return true;
  }
  if (v_free) {
    const auto m = reduced_mean(v_, v_.lambda,
                                v_.n_half + coupling_into(v_, w_.mean));
    if (!m) return false;
    v_.mean = *m;
    return true;
  }
  if (w_free) {
    const auto m = reduced_mean(w_, w_.lambda,
                                w_.n_half + coupling_into(w_, v_.mean));
    if (!m) return false;
    w_.mean = *m;
    return true;
  }
  return true;
}

void WorstCaseSolver::joint_residuals(double lv, double lw, double* rv,
                                      double* rw) const {
  WorstCaseSolver probe = *this;
  probe.v_.lambda = lv;
  probe.w_.lambda = lw;
  if (!probe.joint_refresh()) {
    *rv = kInf;
    *rw = kInf;
    return;
  }
  *rv = probe.v_.trace2(lv) + probe.v_.mean.squaredNorm() -
        probe.v_.rho * probe.v_.rho;
  *rw = probe.w_.trace2(lw) + probe.w_.mean.squaredNorm() -
        probe.w_.rho * probe.w_.rho;
}

// Two-variable damped Newton on the pair of radius residuals, entered when
// the alternation stalls on a coupled instance.
void WorstCaseSolver::newton_polish() {
  const double sv = std::max(1.0, v_.rho * v_.rho);
  const double sw = std::max(1.0, w_.rho * w_.rho);
  double lv = v_.lambda, lw = w_.lambda, rv, rw;
  joint_residuals(lv, lw, &rv, &rw);
  double err = std::max(std::abs(rv) / sv, std::abs(rw) / sw);
  for (int it = 0; it < 60 && err > 0.5 * opts_.tolerance; ++it) {
    const double hv = 1e-7 * (1.0 + lv);
    const double hw = 1e-7 * (1.0 + lw);
    double rv_p, rw_p, rv_m, rw_m;
    Eigen::Matrix2d J;
    joint_residuals(lv + hv, lw, &rv_p, &rw_p);
    joint_residuals(std::max(lv - hv, v_.lambda_lb), lw, &rv_m, &rw_m);
    J(0, 0) = (rv_p - rv_m) / (lv + hv - std::max(lv - hv, v_.lambda_lb));
    J(1, 0) = (rw_p - rw_m) / (lv + hv - std::max(lv - hv, v_.lambda_lb));
    joint_residuals(lv, lw + hw, &rv_p, &rw_p);
    joint_residuals(lv, std::max(lw - hw, w_.lambda_lb), &rv_m, &rw_m);
    J(0, 1) = (rv_p - rv_m) / (lw + hw - std::max(lw - hw, w_.lambda_lb));
    J(1, 1) = (rw_p - rw_m) / (lw + hw - std::max(lw - hw, w_.lambda_lb));
    if (!J.allFinite() || std::abs(J.determinant()) < 1e-300) break;
    const Eigen::Vector2d step = J.inverse() * Eigen::Vector2d(rv, rw);
    double alpha = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt, alpha *= 0.5) {
      const double cv = std::max(lv - alpha * step[0], v_.lambda_lb);
      const double cw = std::max(lw - alpha * step[1], w_.lambda_lb);
      double trv, trw;
      joint_residuals(cv, cw, &trv, &trw);
      const double cand = std::max(std::abs(trv) / sv, std::abs(trw) / sw);
      if (cand < err) {
        lv = cv;
        lw = cw;
        rv = trv;
        rw = trw;
        err = cand;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  v_.lambda = lv;
  w_.lambda = lw;
  joint_refresh();
}

WorstCaseSolution WorstCaseSolver::run() {
  require_pd(amb_.cov_v_ref, "cov_v_ref");
  require_pd(amb_.cov_w_ref, "cov_w_ref");
  if (amb_.rho_v < 0.0 || amb_.rho_w < 0.0)
    throw Error("ambiguity radii must be nonnegative");
  const int n = static_cast<int>(amb_.cov_v_ref.rows());
  const int p = static_cast<int>(amb_.cov_w_ref.rows());
  check_quadratic_shapes(nq_, n, p);
  require_psd(sym(nq_.Pv), "Pv");
  require_psd(sym(nq_.Pw), "Pw");

  v_ = make_channel("process", nq_.Pv, nq_.Nv, amb_.cov_v_ref, nq_.nv,
                    amb_.rho_v);
  w_ = make_channel("measurement", nq_.Pw, nq_.Nw, amb_.cov_w_ref, nq_.nw,
                    amb_.rho_w);
  const bool have_coupling = !nq_.S.isZero(0.0);

  auto classify = [&](Channel& ch, bool other_pinned) {
    if (ch.rho == 0.0) {
      ch.mode = Channel::Mode::Pinned;
      ch.lambda = kInf;
    } else if (ch.P.isZero(0.0) && ch.Lam.isZero(0.0) &&
               ch.n_half.isZero(0.0) && (!have_coupling || other_pinned)) {
      ch.mode = Channel::Mode::Inert;
      ch.lambda = 0.0;
    } else {
      ch.mode = Channel::Mode::Active;
    }
  };
  classify(v_, w_.rho == 0.0);
  classify(w_, v_.rho == 0.0);

  const bool coupled = have_coupling && v_.mode == Channel::Mode::Active &&
                       w_.mode == Channel::Mode::Active;
  const double sv = std::max(1.0, v_.rho * v_.rho);
  const double sw = std::max(1.0, w_.rho * w_.rho);

  double best_err = kInf;
  int stall = 0;
  for (rounds_ = 1; rounds_ <= opts_.max_iter; ++rounds_) {
    if (v_.free()) solve_channel(v_, w_);
    if (w_.free()) solve_channel(w_, v_);
    joint_refresh();

    double rv = 0.0, rw = 0.0;
    if (v_.mode == Channel::Mode::Active)
      rv = v_.trace2(v_.lambda) + v_.mean.squaredNorm() - v_.rho * v_.rho;
    if (w_.mode == Channel::Mode::Active)
      rw = w_.trace2(w_.lambda) + w_.mean.squaredNorm() - w_.rho * w_.rho;
    const double err = std::max(std::abs(rv) / sv, std::abs(rw) / sw);
    if (err <= opts_.tolerance) {
      converged_ = true;
      break;
    }
    if (!coupled || !v_.free() || !w_.free()) {
      // Nothing left to alternate over; the residual is as good as the
      // one-dimensional solves can make it.
      converged_ = err <= std::sqrt(opts_.tolerance);
      if (!converged_)
        throw ConvergenceError(
            "worst-case solver failed to satisfy the radius equations", err);
      break;
    }
    if (err >= best_err * (1.0 - 1e-3)) {
      if (++stall >= 5) {
        newton_polish();
        stall = 0;
      }
    } else {
      stall = 0;
    }
    best_err = std::min(best_err, err);
  }
  if (!converged_) {
    double rv, rw;
    joint_residuals(v_.lambda, w_.lambda, &rv, &rw);
    const double err = std::max(std::abs(rv) / sv, std::abs(rw) / sw);
    if (err <= opts_.tolerance) {
      converged_ = true;
    } else {
      newton_polish();
      joint_residuals(v_.lambda, w_.lambda, &rv, &rw);
      if (std::max(std::abs(rv) / sv, std::abs(rw) / sw) > opts_.tolerance)
        throw ConvergenceError(
            "worst-case solver exhausted its iteration budget",
            std::max(std::abs(rv) / sv, std::abs(rw) / sw));
      converged_ = true;
    }
  }
  return finalize();
}

WorstCaseSolution WorstCaseSolver::finalize() const {
  WorstCaseSolution sol;
  sol.lambda_v = v_.lambda;
  sol.lambda_w = w_.lambda;
  sol.iterations = rounds_;

  auto channel_moments = [](const Channel& ch, Eigen::VectorXd* mean,
                            Eigen::MatrixXd* cov) {
    const Eigen::MatrixXd A = ch.pushforward_map();
    *mean = (ch.mode == Channel::Mode::Active)
                ? ch.mean
                : Eigen::VectorXd::Zero(ch.dim());
    *cov = A * ch.cov_ref * A.transpose();
  };
  channel_moments(v_, &sol.moments.mean_v, &sol.moments.cov_v);
  channel_moments(w_, &sol.moments.mean_w, &sol.moments.cov_w);

  auto channel_core = [](const Channel& ch) {
    switch (ch.mode) {
      case Channel::Mode::Inert:
        return 0.0;
      case Channel::Mode::Pinned:
        // λ → ∞ limit of λρ² + λ·tr(Σ̂P(λI−P)^{-1}) with ρ = 0.
        return (ch.P * ch.cov_ref).trace();
      case Channel::Mode::Active:
        return ch.lambda * ch.rho * ch.rho + ch.lambda * ch.trace1(ch.lambda) +
               ch.mean.dot(ch.n_half);
    }
    return 0.0;
  };
  sol.cost_core = channel_core(v_) + channel_core(w_);
  sol.cost = sol.cost_core + nq_.c0;

  auto radius_res = [](const Channel& ch) {
    if (ch.mode != Channel::Mode::Active) return 0.0;
    return ch.trace2(ch.lambda) + ch.mean.squaredNorm() - ch.rho * ch.rho;
  };
  sol.residuals.radius_v = radius_res(v_);
  sol.residuals.radius_w = radius_res(w_);

  // Stationarity residual and eigenvalue certificate over the active blocks
  // of the joint mean-system matrix.
  const bool va = v_.mode == Channel::Mode::Active;
  const bool wa = w_.mode == Channel::Mode::Active;
  const int nn = va ? v_.dim() : 0;
  const int pp = wa ? w_.dim() : 0;
  if (nn + pp > 0) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nn + pp, nn + pp);
    Eigen::VectorXd mvec(nn + pp), rhs(nn + pp);
    if (va) {
      M.topLeftCorner(nn, nn) =
          v_.lambda * Eigen::MatrixXd::Identity(nn, nn) - v_.Lam;
      mvec.head(nn) = v_.mean;
      rhs.head(nn) = v_.n_half;
    }
    if (wa) {
      M.bottomRightCorner(pp, pp) =
          w_.lambda * Eigen::MatrixXd::Identity(pp, pp) - w_.Lam;
      mvec.tail(pp) = w_.mean;
      rhs.tail(pp) = w_.n_half;
    }
    if (va && wa) {
      M.topRightCorner(nn, pp) = -0.5 * nq_.S.transpose();
      M.bottomLeftCorner(pp, nn) = -0.5 * nq_.S;
    }
    sol.residuals.mean_system =
        (M * mvec - rhs).norm() / (1.0 + rhs.norm());
    sol.residuals.certificate = min_eigenvalue(M);
  }

  sol.residuals.cost_consistency =
      std::abs(sol.cost - expected_cost(nq_, sol.moments)) /
      (1.0 + std::abs(sol.cost));
  return sol;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> mean_system_solve(
    const NoiseQuadratic& nq, double lambda_v, double lambda_w) {
  const int n = static_cast<int>(nq.Pv.rows());
  const int p = static_cast<int>(nq.Pw.rows());
  check_quadratic_shapes(nq, n, p);
  if (!(lambda_v > max_eigenvalue(nq.Pv)) ||
      !(lambda_w > max_eigenvalue(nq.Pw)))
    throw Error("multipliers must exceed the spectral radii of Pv and Pw");

  Eigen::MatrixXd M(n + p, n + p);
  M.topLeftCorner(n, n) = lambda_v * Eigen::MatrixXd::Identity(n, n) -
                          sym(nq.Pv) - sym(nq.Nv);
  M.bottomRightCorner(p, p) = lambda_w * Eigen::MatrixXd::Identity(p, p) -
                              sym(nq.Pw) - sym(nq.Nw);
  M.topRightCorner(n, p) = -0.5 * nq.S.transpose();
  M.bottomLeftCorner(p, n) = -0.5 * nq.S;
  Eigen::VectorXd rhs(n + p);
  rhs << 0.5 * nq.nv, 0.5 * nq.nw;

  double smallest = 0.0;
  const auto x = svd_solve(M, rhs, &smallest);
  if (!x)
    throw SingularSystemError(
        "mean stationarity system is numerically singular", smallest);
  return {x->head(n), x->tail(p)};
}

double radius_residual(const Eigen::MatrixXd& P,
                       const Eigen::MatrixXd& cov_ref, double lambda,
                       const Eigen::VectorXd& mean, double rho) {
  const SymEig eig = sym_eig(P);
  if (!(lambda > eig.values.maxCoeff()))
    throw Error("multiplier must exceed λmax(P) strictly");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const Eigen::VectorXd u = eig.vectors.col(i);
    const double pi = eig.values[i];
    const double d = lambda - pi;
    acc += u.dot(cov_ref * u) * pi * pi / (d * d);
  }
  return acc + mean.squaredNorm() - rho * rho;
}

WorstCaseSolution solve_worst_case(const NoiseQuadratic& nq,
                                   const AmbiguitySpec& amb,
                                   const SolverOptions& opts) {
  WorstCaseSolver solver(nq, amb, opts);
  return solver.run();
}

double FirstOrderReport::max_residual() const {
  return std::max({mean_residual, cov_residual, boundary_residual});
}

FirstOrderReport verify_first_order(const WorstCaseSolution& solution,
                                    const NoiseQuadratic& nq,
                                    const AmbiguitySpec& amb) {
  FirstOrderReport report;
  struct Side {
    const Eigen::MatrixXd* P;
    const Eigen::MatrixXd* N;
    const Eigen::MatrixXd* cov_ref;
    const Eigen::VectorXd* n_vec;
    const Eigen::VectorXd* mean;
    const Eigen::MatrixXd* cov;
    Eigen::VectorXd cross;  // Sᵀ m_w / 2 (resp. S m_v / 2)
    double lambda;
    double rho;
  };
  const Side sides[2] = {
      {&nq.Pv, &nq.Nv, &amb.cov_v_ref, &nq.nv, &solution.moments.mean_v,
       &solution.moments.cov_v, 0.5 * nq.S.transpose() * solution.moments.mean_w,
       solution.lambda_v, amb.rho_v},
      {&nq.Pw, &nq.Nw, &amb.cov_w_ref, &nq.nw, &solution.moments.mean_w,
       &solution.moments.cov_w, 0.5 * nq.S * solution.moments.mean_v,
       solution.lambda_w, amb.rho_w},
  };
  for (const Side& s : sides) {
    const int d = static_cast<int>(s.P->rows());
    const Eigen::MatrixXd P = sym(*s.P);
    if (s.lambda == 0.0) continue;  // inert channel: no stationarity claim
    if (std::isinf(s.lambda)) {
      // ρ = 0: the ball is a point; the solution must be the reference.
      report.mean_residual = std::max(report.mean_residual, s.mean->norm());
      report.cov_residual = std::max(
          report.cov_residual,
          (*s.cov - *s.cov_ref).norm() / (1.0 + s.cov_ref->norm()));
      continue;
    }
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    // Mean stationarity (λI − P − sym(N)) m = n/2 + cross.
    const Eigen::VectorXd mres =
        (s.lambda * I - P - sym(*s.N)) * (*s.mean) - 0.5 * (*s.n_vec) - s.cross;
    report.mean_residual =
        std::max(report.mean_residual, mres.norm() / (1.0 + s.n_vec->norm()));
    // Covariance pushforward Σ = (I − P/λ)^{-1} Σ̂ (I − P/λ)^{-1}.
    const Eigen::MatrixXd A = (I - P / s.lambda).inverse();
    report.cov_residual = std::max(
        report.cov_residual, (*s.cov - A * (*s.cov_ref) * A.transpose()).norm() /
                                 (1.0 + s.cov_ref->norm()));
    // Boundary membership through the optimal-transport distance.
    GaussianSpec worst{*s.mean, *s.cov};
    GaussianSpec ref{Eigen::VectorXd::Zero(d), *s.cov_ref};
    const double dist = gelbrich_distance(worst, ref);
    report.boundary_residual = std::max(
        report.boundary_residual, std::abs(dist * dist - s.rho * s.rho));
  }
  return report;
}

}  // namespace drlqg
