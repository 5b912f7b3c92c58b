#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drlqg/best_response.hpp"
#include "drlqg/cost.hpp"
#include "drlqg/equilibrium.hpp"
#include "drlqg/errors.hpp"
#include "drlqg/gauss_ot.hpp"
#include "drlqg/policy.hpp"
#include "drlqg/problem.hpp"
#include "drlqg/sim_eval.hpp"
#include "drlqg/stacked.hpp"
#include "drlqg/worst_case.hpp"

namespace py = pybind11;
using namespace drlqg;

namespace {

NoiseQuadratic policy_quadratic(const ControlProblem& problem,
                                const LinearPolicy& policy) {
  const StackedMatrices stacked = assemble_stacked(problem);
  return aggregate_noise_matrices(f_matrices(stacked, policy, problem.x0));
}

}  // namespace

PYBIND11_MODULE(_drlqg, m) {
  m.doc() =
      "Distributionally robust LQG synthesis: worst-case noise, best linear "
      "responses, and saddle-point computation under Wasserstein ambiguity";

  py::register_exception<Error>(m, "Error");

  py::class_<ControlProblem>(m, "ControlProblem")
      .def(py::init<>())
      .def_readwrite("horizon", &ControlProblem::horizon)
      .def_readwrite("A", &ControlProblem::A)
      .def_readwrite("B", &ControlProblem::B)
      .def_readwrite("C", &ControlProblem::C)
      .def_readwrite("Q", &ControlProblem::Q)
      .def_readwrite("R", &ControlProblem::R)
      .def_readwrite("x0", &ControlProblem::x0)
      .def("state_dim", &ControlProblem::state_dim)
      .def("input_dim", &ControlProblem::input_dim)
      .def("output_dim", &ControlProblem::output_dim);

  py::class_<LinearPolicy>(m, "LinearPolicy")
      .def_readonly("horizon", &LinearPolicy::horizon)
      .def_readonly("input_dim", &LinearPolicy::m)
      .def_readonly("output_dim", &LinearPolicy::p)
      .def_readonly("U", &LinearPolicy::U)
      .def_readonly("q", &LinearPolicy::q);

  py::class_<NoiseMoments>(m, "NoiseMoments")
      .def(py::init<>())
      .def_readwrite("mean_v", &NoiseMoments::mean_v)
      .def_readwrite("cov_v", &NoiseMoments::cov_v)
      .def_readwrite("mean_w", &NoiseMoments::mean_w)
      .def_readwrite("cov_w", &NoiseMoments::cov_w);

  py::class_<AmbiguitySpec>(m, "AmbiguitySpec")
      .def(py::init<>())
      .def_readwrite("cov_v_ref", &AmbiguitySpec::cov_v_ref)
      .def_readwrite("cov_w_ref", &AmbiguitySpec::cov_w_ref)
      .def_readwrite("rho_v", &AmbiguitySpec::rho_v)
      .def_readwrite("rho_w", &AmbiguitySpec::rho_w);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("tolerance", &SolverOptions::tolerance)
      .def_readwrite("max_iter", &SolverOptions::max_iter)
      .def_readwrite("bracket_factor", &SolverOptions::bracket_factor);

  py::class_<WorstCaseResiduals>(m, "WorstCaseResiduals")
      .def_readonly("radius_v", &WorstCaseResiduals::radius_v)
      .def_readonly("radius_w", &WorstCaseResiduals::radius_w)
      .def_readonly("mean_system", &WorstCaseResiduals::mean_system)
      .def_readonly("certificate", &WorstCaseResiduals::certificate)
      .def_readonly("cost_consistency", &WorstCaseResiduals::cost_consistency);

  py::class_<WorstCaseSolution>(m, "WorstCaseSolution")
      .def_readonly("lambda_v", &WorstCaseSolution::lambda_v)
      .def_readonly("lambda_w", &WorstCaseSolution::lambda_w)
      .def_readonly("moments", &WorstCaseSolution::moments)
      .def_readonly("cost_core", &WorstCaseSolution::cost_core)
      .def_readonly("cost", &WorstCaseSolution::cost)
      .def_readonly("residuals", &WorstCaseSolution::residuals)
      .def_readonly("iterations", &WorstCaseSolution::iterations);

  py::class_<EquilibriumOptions>(m, "EquilibriumOptions")
      .def(py::init<>())
      .def_readwrite("value_tolerance", &EquilibriumOptions::value_tolerance)
      .def_readwrite("policy_tolerance", &EquilibriumOptions::policy_tolerance)
      .def_readwrite("max_rounds", &EquilibriumOptions::max_rounds)
      .def_readwrite("inner", &EquilibriumOptions::inner)
      .def_readwrite("gap_samples", &EquilibriumOptions::gap_samples)
      .def_readwrite("gap_seed", &EquilibriumOptions::gap_seed)
      .def_readwrite("use_danskin", &EquilibriumOptions::use_danskin);

  py::class_<Equilibrium>(m, "Equilibrium")
      .def_readonly("policy", &Equilibrium::policy)
      .def_readonly("nature", &Equilibrium::nature)
      .def_readonly("value", &Equilibrium::value)
      .def_readonly("gap", &Equilibrium::gap)
      .def_readonly("rounds", &Equilibrium::rounds);

  m.def("make_time_invariant_problem", &make_time_invariant_problem,
        py::arg("horizon"), py::arg("A"), py::arg("B"), py::arg("C"),
        py::arg("Q"), py::arg("R"), py::arg("x0"),
        "Replicate time-invariant data across the horizon");
  m.def("validate_problem", &validate_problem, py::arg("problem"));
  m.def("make_policy", &make_policy, py::arg("horizon"), py::arg("input_dim"),
        py::arg("output_dim"), py::arg("U"), py::arg("q"),
        "Build a causal affine purified-output policy u = U eta + q");
  m.def("make_zero_policy", &make_zero_policy, py::arg("horizon"),
        py::arg("input_dim"), py::arg("output_dim"));
  m.def("reference_moments", &reference_moments, py::arg("cov_v"),
        py::arg("cov_w"), "Zero-mean moments at the reference covariances");

  m.def(
      "expected_cost",
      [](const ControlProblem& problem, const LinearPolicy& policy,
         const NoiseMoments& moments) {
        return expected_cost(policy_quadratic(problem, policy), moments);
      },
      py::arg("problem"), py::arg("policy"), py::arg("moments"),
      "Exact expected closed-loop cost under i.i.d. noise moments");

  m.def(
      "solve_worst_case",
      [](const ControlProblem& problem, const LinearPolicy& policy,
         const AmbiguitySpec& amb, const SolverOptions& opts) {
        return solve_worst_case(policy_quadratic(problem, policy), amb, opts);
      },
      py::arg("problem"), py::arg("policy"), py::arg("ambiguity"),
      py::arg("options") = SolverOptions{},
      "Worst-case noise moments and cost for a fixed policy");

  m.def(
      "best_linear_response",
      [](const ControlProblem& problem, const NoiseMoments& moments) {
        return best_linear_response(assemble_stacked(problem), moments,
                                    problem.x0);
      },
      py::arg("problem"), py::arg("moments"),
      "Optimal causal affine policy against fixed noise moments");

  m.def("dp_lqg_value", &dp_lqg_value, py::arg("problem"), py::arg("moments"),
        "Optimal-value oracle: Kalman filter + affine LQR recursion");

  m.def("iterated_best_response", &iterated_best_response, py::arg("problem"),
        py::arg("ambiguity"), py::arg("options") = EquilibriumOptions{},
        "Saddle point by alternating worst case and best response");

  m.def(
      "nash_gap",
      [](const Equilibrium& eq, const ControlProblem& problem,
         const AmbiguitySpec& amb, int samples, std::uint64_t seed) {
        return nash_gap(eq, problem, amb, samples, seed);
      },
      py::arg("equilibrium"), py::arg("problem"), py::arg("ambiguity"),
      py::arg("samples") = 200, py::arg("seed") = 1234,
      "Sampled deviation certificate for a candidate saddle point");

  m.def(
      "gelbrich_distance",
      [](const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1,
         const Eigen::VectorXd& mean2, const Eigen::MatrixXd& cov2) {
        return gelbrich_distance(GaussianSpec{mean1, cov1},
                                 GaussianSpec{mean2, cov2});
      },
      py::arg("mean1"), py::arg("cov1"), py::arg("mean2"), py::arg("cov2"),
      "Type-2 transport distance between Gaussian moment pairs");

  m.def(
      "monte_carlo_gaussian_cost",
      [](const ControlProblem& problem, const LinearPolicy& policy,
         const NoiseMoments& moments, long long n_samples,
         std::uint64_t seed) {
        const MonteCarloResult r = monte_carlo_cost(
            problem, policy, NoiseSampler::gaussian(moments.mean_v, moments.cov_v),
            NoiseSampler::gaussian(moments.mean_w, moments.cov_w), n_samples,
            seed);
        return py::make_tuple(r.mean, r.stderr_);
      },
      py::arg("problem"), py::arg("policy"), py::arg("moments"),
      py::arg("n_samples"), py::arg("seed"),
      "Monte Carlo (mean, stderr) under Gaussian samplers at the moments");

  m.def(
      "reproduce_motivating_example",
      []() {
        py::list rows;
        for (const ExampleRow& row : reproduce_motivating_example().rows) {
          py::dict d;
          d["formulation"] = row.formulation;
          d["K1"] = row.K1;
          d["worst_case_cost"] = row.worst_case_cost;
          d["adversary_description"] = row.adversary_description;
          rows.append(d);
        }
        return rows;
      },
      "Four-row report for the two-step scalar example");
}
