"""Distributionally robust LQG synthesis under Wasserstein ambiguity.

Thin python surface over the C++ core: build a finite-horizon problem,
compute worst-case noise distributions against a fixed policy, best linear
responses against fixed noise moments, and the saddle point of the two.
"""

from ._drlqg import (
    AmbiguitySpec,
    ControlProblem,
    Equilibrium,
    EquilibriumOptions,
    Error,
    LinearPolicy,
    NoiseMoments,
    SolverOptions,
    WorstCaseResiduals,
    WorstCaseSolution,
    best_linear_response,
    dp_lqg_value,
    expected_cost,
    gelbrich_distance,
    iterated_best_response,
    make_policy,
    make_time_invariant_problem,
    make_zero_policy,
    monte_carlo_gaussian_cost,
    nash_gap,
    reference_moments,
    reproduce_motivating_example,
    solve_worst_case,
    validate_problem,
)

__all__ = [
    "AmbiguitySpec",
    "ControlProblem",
    "Equilibrium",
    "EquilibriumOptions",
    "Error",
    "LinearPolicy",
    "NoiseMoments",
    "SolverOptions",
    "WorstCaseResiduals",
    "WorstCaseSolution",
    "best_linear_response",
    "dp_lqg_value",
    "expected_cost",
    "gelbrich_distance",
    "iterated_best_response",
    "make_policy",
    "make_time_invariant_problem",
    "make_zero_policy",
    "monte_carlo_gaussian_cost",
    "nash_gap",
    "reference_moments",
    "reproduce_motivating_example",
    "solve_worst_case",
    "validate_problem",
]
