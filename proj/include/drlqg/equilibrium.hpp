#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drlqg/best_response.hpp"
#include "drlqg/errors.hpp"
#include "drlqg/policy.hpp"
#include "drlqg/problem.hpp"
#include "drlqg/random.hpp"
#include "drlqg/worst_case.hpp"

namespace drlqg {

struct EquilibriumOptions {
  double value_tolerance = 1e-9;   // relative change of the game value
  double policy_tolerance = 1e-8;  // Frobenius change of (U, q)
  int max_rounds = 500;
  SolverOptions inner;    // worst-case subproblem options
  int gap_samples = 200;  // nature deviations probed when certifying the gap
  std::uint64_t gap_seed = 0x9f2d3c4b5a697887ull;
  // Gradient outer loop (policy moves by −(1/L)·∇, with the worst-case
  // distribution held as the inner maximiser) instead of exact best
  // responses.  Slower; kept for cross-checking the alternation path.
  bool use_danskin = false;
};

struct EquilibriumTraceRow {
  int round = 0;
  double value = 0.0;         // worst-case value at the round's policy
  double policy_delta = 0.0;  // Frobenius change of (U, q) this round
  double nature_delta = 0.0;  // change of the worst-case moments this round
};

// Saddle point of the minimax control problem: a policy and a pair of
// Gaussian noise moments where neither player can improve unilaterally.
struct Equilibrium {
  LinearPolicy policy;
  NoiseMoments nature;  // worst-case Gaussian moments at the policy
  double value = 0.0;
  double gap = 0.0;  // one-sided deviation bound from nash_gap
  int rounds = 0;
  std::vector<EquilibriumTraceRow> trace;
};

// Alternation ran out of rounds; carries the trace accumulated so far.
struct EquilibriumDivergence : ConvergenceError {
  EquilibriumDivergence(const std::string& msg, double residual,
                        std::vector<EquilibriumTraceRow> trace_rows)
      : ConvergenceError(msg, residual), trace(std::move(trace_rows)) {}
  std::vector<EquilibriumTraceRow> trace;
};

// Alternates worst-case noise (nature) and best linear response (policy)
// from a deterministic start — nature at the reference moments, policy at
// the response to the reference — until the value change is below
// value_tolerance (relative) and the policy change below policy_tolerance.
// If the value change alternates sign three times in a row, the last two
// nature moments are averaged before the next policy move.
Equilibrium iterated_best_response(const ControlProblem& problem,
                                   const AmbiguitySpec& amb,
                                   const EquilibriumOptions& opts = {});

// Deviation certificate max(0, a, b):
//   a = max over sampled feasible Gaussian moments of J(π*, ·) − value,
//   b = value − best-response cost at the equilibrium nature.
// Both are ≤ tolerance at a true saddle point.  Sampling is driven by the
// caller's seed; the evaluation itself is deterministic.
double nash_gap(const Equilibrium& eq, const ControlProblem& problem,
                const AmbiguitySpec& amb, int n_samples, std::uint64_t seed);

// Random Gaussian moments inside the ambiguity set.  A raw perturbation of
// the reference is pulled back along the segment towards the reference —
// the type-2 ball is convex, so the segment stays feasible — and with
// push_to_boundary the scale is bisected onto the sphere instead.
NoiseMoments sample_feasible_moments(const AmbiguitySpec& amb, Rng& rng,
                                     bool push_to_boundary);

}  // namespace drlqg
