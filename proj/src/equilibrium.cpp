#include "drlqg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "drlqg/cost.hpp"
#include "drlqg/gauss_ot.hpp"
#include "drlqg/linalg.hpp"
#include "drlqg/stacked.hpp"

namespace drlqg {

namespace {

double moment_delta(const NoiseMoments& a, const NoiseMoments& b) {
  return std::sqrt((a.mean_v - b.mean_v).squaredNorm() +
                   (a.cov_v - b.cov_v).squaredNorm() +
                   (a.mean_w - b.mean_w).squaredNorm() +
                   (a.cov_w - b.cov_w).squaredNorm());
}

// Convex combination (1 - t)·a + t·b. The squared Gelbrich distance to the
// reference is jointly convex in (mean, cov), so mixing two feasible moment
// pairs stays inside the ambiguity ball.
NoiseMoments mix_moments(const NoiseMoments& a, const NoiseMoments& b,
                         double t) {
  NoiseMoments out;
  out.mean_v = (1.0 - t) * a.mean_v + t * b.mean_v;
  out.cov_v = (1.0 - t) * a.cov_v + t * b.cov_v;
  out.mean_w = (1.0 - t) * a.mean_w + t * b.mean_w;
  out.cov_w = (1.0 - t) * a.cov_w + t * b.cov_w;
  return out;
}

WorstCaseSolution nature_move(const StackedMatrices& stacked,
                              const LinearPolicy& policy,
                              const Eigen::VectorXd& x0,
                              const AmbiguitySpec& amb,
                              const SolverOptions& inner) {
  const NoiseQuadratic nq =
      aggregate_noise_matrices(f_matrices(stacked, policy, x0));
  return solve_worst_case(nq, amb, inner);
}

double policy_distance(const LinearPolicy& a, const LinearPolicy& b) {
  return std::sqrt((a.U - b.U).squaredNorm() + (a.q - b.q).squaredNorm());
}

// Curvature bound for the response quadratic in (U, q): the Hessian blocks
// are built from 2W against second moments of the purified outputs, so
// 2·λmax(W)·(λmax(Mηη) + 1) bounds the block curvatures; the extra factor 2
// absorbs the U–q coupling.
double response_curvature_bound(const StackedMatrices& stacked,
                                const NoiseMoments& moments) {
  const int T = stacked.horizon;
  const int n = stacked.n;
  const int p = stacked.p;
  Eigen::MatrixXd big_cov_v = Eigen::MatrixXd::Zero(T * n, T * n);
  Eigen::MatrixXd big_cov_w = Eigen::MatrixXd::Zero(T * p, T * p);
  Eigen::VectorXd big_mean_v(T * n);
  Eigen::VectorXd big_mean_w(T * p);
  for (int t = 0; t < T; ++t) {
    big_cov_v.block(t * n, t * n, n, n) = moments.cov_v;
    big_cov_w.block(t * p, t * p, p, p) = moments.cov_w;
    big_mean_v.segment(t * n, n) = moments.mean_v;
    big_mean_w.segment(t * p, p) = moments.mean_w;
  }
  const Eigen::VectorXd eta_mean = stacked.D * big_mean_v + big_mean_w;
  const Eigen::MatrixXd eta_second =
      stacked.D * big_cov_v * stacked.D.transpose() + big_cov_w +
      eta_mean * eta_mean.transpose();
  const Eigen::MatrixXd W =
      stacked.R + stacked.H.transpose() * stacked.Q * stacked.H;
  return 4.0 * max_eigenvalue(sym(W)) *
         (max_eigenvalue(sym(eta_second)) + 1.0);
}

Equilibrium finalize(const StackedMatrices& stacked,
                     const ControlProblem& problem, const AmbiguitySpec& amb,
                     const EquilibriumOptions& opts, LinearPolicy policy,
                     std::vector<EquilibriumTraceRow> trace) {
  const WorstCaseSolution wc =
      nature_move(stacked, policy, problem.x0, amb, opts.inner);
  Equilibrium eq;
  eq.policy = std::move(policy);
  eq.nature = wc.moments;
  eq.value = wc.cost;
  eq.rounds = static_cast<int>(trace.size());
  eq.trace = std::move(trace);
  eq.gap = nash_gap(eq, problem, amb, opts.gap_samples, opts.gap_seed);
  return eq;
}

[[noreturn]] void throw_no_convergence(
    const std::vector<EquilibriumTraceRow>& trace, double residual) {
  std::ostringstream msg;
  msg << "iterated best response exhausted its round budget (" << trace.size()
      << " rounds); last value " << trace.back().value << ", policy change "
      << trace.back().policy_delta;
  throw EquilibriumDivergence(msg.str(), residual, trace);
}

// Projected-gradient descent on the outer max-function Φ(U, q) =
// max over feasible moments of the expected cost. Φ is convex (a pointwise
// maximum of convex quadratics) and the worst-case moments furnish its
// gradient, so the 1/L step converges globally — unlike best-response
// alternation, which can be repelled from the saddle point. `trace` may
// carry rounds already spent by a caller; the shared budget is
// opts.max_rounds in total.
Equilibrium danskin_descent(const StackedMatrices& stacked,
                            const ControlProblem& problem,
                            const AmbiguitySpec& amb,
                            const EquilibriumOptions& opts,
                            LinearPolicy policy,
                            std::vector<EquilibriumTraceRow> trace) {
  double prev_value = trace.empty() ? 0.0 : trace.back().value;
  NoiseMoments prev_nature = reference_moments(amb.cov_v_ref, amb.cov_w_ref);
  for (int round = static_cast<int>(trace.size()) + 1;
       round <= opts.max_rounds; ++round) {
    const WorstCaseSolution wc =
        nature_move(stacked, policy, problem.x0, amb, opts.inner);
    // The worst-case moments are the inner maximiser; the outer objective's
    // gradient at the policy equals the fixed-moments gradient there.
    const auto [grad_u, grad_q] =
        policy_gradient(stacked, wc.moments, problem.x0, policy);
    const double L = response_curvature_bound(stacked, wc.moments);
    LinearPolicy next = policy;
    next.U -= grad_u / L;
    next.q -= grad_q / L;

    const double policy_delta = policy_distance(next, policy);
    const double nature_delta = moment_delta(wc.moments, prev_nature);
    trace.push_back({round, wc.cost, policy_delta, nature_delta});
    const bool value_ok =
        round >= 2 && std::abs(wc.cost - prev_value) <=
                          opts.value_tolerance * std::max(1.0, std::abs(wc.cost));
    prev_value = wc.cost;
    prev_nature = wc.moments;
    policy = std::move(next);
    if (value_ok && policy_delta <= opts.policy_tolerance)
      return finalize(stacked, problem, amb, opts, std::move(policy),
                      std::move(trace));
  }
  throw_no_convergence(trace, trace.back().policy_delta);
}

}  // namespace

Equilibrium iterated_best_response(const ControlProblem& problem,
                                   const AmbiguitySpec& amb,
                                   const EquilibriumOptions& opts) {
  validate_problem(problem);
  const StackedMatrices stacked = assemble_stacked(problem);
  const NoiseMoments reference =
      reference_moments(amb.cov_v_ref, amb.cov_w_ref);
  LinearPolicy policy = best_linear_response(stacked, reference, problem.x0);
  if (opts.use_danskin)
    return danskin_descent(stacked, problem, amb, opts, std::move(policy), {});

  std::vector<EquilibriumTraceRow> trace;
  double prev_value = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  LinearPolicy best_policy = policy;
  double min_policy_delta = std::numeric_limits<double>::infinity();
  int last_sign = 0;
  int alternations = 0;
  int calm_rounds = 0;
  // Fraction of the nature move that is applied. Plain alternation can orbit
  // the saddle point on a limit cycle; a one-off averaging pull is not
  // contractive because the cycle resumes at the same amplitude. Instead the
  // step is halved each time the value keeps flip-flopping and the damping
  // stays in force, shrinking the cycle geometrically; long monotone
  // stretches cautiously restore the full step.
  double mix = 1.0;
  NoiseMoments prev_nature = reference;
  for (int round = 1; round <= opts.max_rounds; ++round) {
    const WorstCaseSolution wc =
        nature_move(stacked, policy, problem.x0, amb, opts.inner);
    const double value = wc.cost;
    if (value < best_value) {
      best_value = value;
      best_policy = policy;
    }
    NoiseMoments nature = wc.moments;

    double value_change = 0.0;
    if (round >= 2) {
      value_change = value - prev_value;
      const int sign = value_change > 0.0 ? 1 : value_change < 0.0 ? -1 : 0;
      if (sign != 0) {
        const bool flipped = last_sign != 0 && sign == -last_sign;
        alternations = flipped ? alternations + 1 : 0;
        calm_rounds = flipped ? 0 : calm_rounds + 1;
        last_sign = sign;
      }
      if (alternations >= 3) {
        mix = std::max(0.5 * mix, 1.0 / 1024.0);
        alternations = 0;
      } else if (calm_rounds >= 8 && mix < 1.0) {
        mix = std::min(2.0 * mix, 1.0);
        calm_rounds = 0;
      }
      if (mix < 1.0) nature = mix_moments(prev_nature, nature, mix);
    }

    LinearPolicy next = best_linear_response(stacked, nature, problem.x0);
    const double policy_delta = policy_distance(next, policy);
    const double nature_delta = moment_delta(nature, prev_nature);
    trace.push_back({round, value, policy_delta, nature_delta});

    const bool value_ok =
        round >= 2 && std::abs(value_change) <=
                          opts.value_tolerance * std::max(1.0, std::abs(value));
    prev_value = value;
    prev_nature = nature;
    policy = std::move(next);
    if (value_ok && policy_delta <= opts.policy_tolerance)
      return finalize(stacked, problem, amb, opts, std::move(policy),
                      std::move(trace));

    min_policy_delta = std::min(min_policy_delta, policy_delta);
    // The saddle point can repel alternation (the linearized round map may
    // have an eigenvalue beyond +1, against which the oscillation damping is
    // powerless). Once the step has regrown two orders of magnitude past its
    // low-water mark the divergence is unambiguous: restart from the best
    // policy seen with the globally convergent descent, on the remaining
    // round budget.
    if (round >= 16 && policy_delta > 10.0 * opts.policy_tolerance &&
        policy_delta > 100.0 * std::max(min_policy_delta, 1e-14))
      return danskin_descent(stacked, problem, amb, opts,
                             std::move(best_policy), std::move(trace));
  }
  return danskin_descent(stacked, problem, amb, opts, std::move(best_policy),
                         std::move(trace));
}

NoiseMoments sample_feasible_moments(const AmbiguitySpec& amb, Rng& rng,
                                     bool push_to_boundary) {
  auto channel = [&](const Eigen::MatrixXd& ref, double rho,
                     Eigen::VectorXd& mean_out, Eigen::MatrixXd& cov_out) {
    const int d = static_cast<int>(ref.rows());
    mean_out = Eigen::VectorXd::Zero(d);
    cov_out = ref;
    if (rho <= 0.0) return;

    Eigen::VectorXd mean_raw(d);
    for (int i = 0; i < d; ++i) mean_raw[i] = rng.normal();
    mean_raw *= rho / std::sqrt(static_cast<double>(d));
    Eigen::MatrixXd pert(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) pert(i, j) = rng.normal();
    pert = sym(pert) * (rho / static_cast<double>(d));

    const GaussianSpec ref_spec{Eigen::VectorXd::Zero(d), ref};
    auto floor_psd = [](const Eigen::MatrixXd& M) {
      const SymEig eig = sym_eig(sym(M));
      const Eigen::VectorXd clipped = eig.values.cwiseMax(0.0);
      return sym(eig.vectors * clipped.asDiagonal() * eig.vectors.transpose());
    };
    Eigen::MatrixXd cov_raw = floor_psd(ref + pert);
    auto distance_at = [&](double s) {
      const GaussianSpec g{s * mean_raw, sym(ref + s * (cov_raw - ref))};
      return gelbrich_distance(ref_spec, g);
    };
    double d1 = distance_at(1.0);
    if (d1 <= 1e-15) return;  // degenerate draw: keep the reference

    if (!push_to_boundary) {
      const double s = std::min(1.0, 0.9 * rho / d1);
      mean_out = s * mean_raw;
      cov_out = sym(ref + s * (cov_raw - ref));
      return;
    }
    // Scale the perturbation until the endpoint is outside the ball, then
    // bisect the segment (distance is convex with value 0 at s = 0, hence
    // monotone on [0, 1]) onto a point just inside the sphere.
    for (int grow = 0; grow < 60 && d1 < rho; ++grow) {
      mean_raw *= 2.0;
      cov_raw = floor_psd(ref + 2.0 * (cov_raw - ref));
      d1 = distance_at(1.0);
    }
    const double target = rho * (1.0 - 1e-9);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (distance_at(mid) < target ? lo : hi) = mid;
    }
    mean_out = lo * mean_raw;
    cov_out = sym(ref + lo * (cov_raw - ref));
  };

  NoiseMoments moments;
  channel(amb.cov_v_ref, amb.rho_v, moments.mean_v, moments.cov_v);
  channel(amb.cov_w_ref, amb.rho_w, moments.mean_w, moments.cov_w);
  return moments;
}

double nash_gap(const Equilibrium& eq, const ControlProblem& problem,
                const AmbiguitySpec& amb, int n_samples, std::uint64_t seed) {
  const StackedMatrices stacked = assemble_stacked(problem);
  const NoiseQuadratic nq =
      aggregate_noise_matrices(f_matrices(stacked, eq.policy, problem.x0));
  const double value = expected_cost(nq, eq.nature);

  // Controller deviation: how much an exact best response to the
  // equilibrium nature would still improve on the equilibrium policy.
  const LinearPolicy response =
      best_linear_response(stacked, eq.nature, problem.x0);
  const NoiseQuadratic nq_response =
      aggregate_noise_matrices(f_matrices(stacked, response, problem.x0));
  const double b = value - expected_cost(nq_response, eq.nature);

  // Nature deviation: the best sampled feasible moments against the
  // equilibrium policy.  Half the samples are pushed onto the sphere, where
  // the worst case lives.
  double a = 0.0;
  Rng rng(seed);
  for (int i = 0; i < n_samples; ++i) {
    const NoiseMoments candidate =
        sample_feasible_moments(amb, rng, i % 2 == 0);
    a = std::max(a, expected_cost(nq, candidate) - value);
  }
  return std::max({0.0, a, b});
}

}  // namespace drlqg
