#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "drlqg/policy.hpp"
#include "drlqg/problem.hpp"
#include "drlqg/random.hpp"

namespace drlqg {

// Stationary per-step noise source: one distribution reused every timestep.
class NoiseSampler {
 public:
  static NoiseSampler gaussian(const Eigen::VectorXd& mean,
                               const Eigen::MatrixXd& cov);
  static NoiseSampler dirac(const Eigen::VectorXd& mean);
  // Two-component Gaussian mixture with common covariance;
  // `weight1` = P(first component) ∈ [0, 1].
  static NoiseSampler bimodal(const Eigen::VectorXd& mean1,
                              const Eigen::VectorXd& mean2,
                              const Eigen::MatrixXd& cov, double weight1 = 0.5);

  Eigen::VectorXd sample(Rng& rng) const;
  int dim() const { return static_cast<int>(mean1_.size()); }

  // Analytic first two moments (mixture formulas for the bimodal case).
  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;

 private:
  enum class Kind { Gaussian, Dirac, Bimodal };
  NoiseSampler() = default;

  Kind kind_ = Kind::Dirac;
  Eigen::VectorXd mean1_, mean2_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd root_;  // Σ^{1/2}
  double weight1_ = 1.0;
};

// One closed-loop rollout under purified-output feedback; returns the
// realized cost.  Per step the measurement noise is drawn before the
// process noise (fixed order keeps seeds reproducible).
double simulate_cost(const ControlProblem& problem, const LinearPolicy& policy,
                     const NoiseSampler& v_sampler,
                     const NoiseSampler& w_sampler, std::uint64_t seed);

struct MonteCarloResult {
  double mean = 0.0;
  double stderr_ = 0.0;  // standard error of the mean
  long long n_samples = 0;
};

// Independent rollouts with per-rollout derived seeds; the aggregation uses
// pairwise summation, so the result is independent of sharding order.
MonteCarloResult monte_carlo_cost(const ControlProblem& problem,
                                  const LinearPolicy& policy,
                                  const NoiseSampler& v_sampler,
                                  const NoiseSampler& w_sampler,
                                  long long n_samples, std::uint64_t seed);

struct ExampleRow {
  std::string formulation;
  double K1 = 0.0;
  double worst_case_cost = 0.0;
  std::string adversary_description;
};

struct ExampleReport {
  std::vector<ExampleRow> rows;
};

// Self-contained study of the scalar system x⁺ = −x + u + v with T = 2,
// x0 = 0, terminal weight 1 and input weight 1/2, over state-feedback gains
// u_1 = K1·x_1 and per-step noise on the second-moment unit ball
// (σ² + m² ≤ 1).  Rows: (1) per-step adversaries chosen independently,
// (2) one stationary adversary, (3) the stationary-optimal gain against the
// per-step adversary, (4) the per-step-optimal gain against the stationary
// adversary.  All four values come from grid + golden-section refinement
// over the boundary parametrization σ² = 1 − m².
ExampleReport reproduce_motivating_example();

}  // namespace drlqg
