#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drlqg/cost.hpp"
#include "drlqg/equilibrium.hpp"
#include "drlqg/policy.hpp"
#include "drlqg/problem.hpp"
#include "drlqg/sim_eval.hpp"
#include "drlqg/worst_case.hpp"

namespace drlqg {

// A fully parsed run configuration.  The JSON schema has top-level fields
//   horizon, matrices {A, B, C, Q, R}, x0, reference {cov_v, cov_w},
//   radii {rho_v, rho_w}, solver {tolerance, max_iter, max_rounds}, seed
// where each matrix family is an array over time of row-major matrices and
// a singleton array broadcasts across the horizon.  Unknown fields are
// errors: the schema fails loudly instead of drifting silently.
struct RunConfig {
  ControlProblem problem;
  AmbiguitySpec ambiguity;
  SolverOptions solver;
  int max_rounds = 500;
  std::uint64_t seed = 0;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Policy files carry {horizon, input_dim, output_dim, U, q} with U as the
// full row-major matrix (zero upper blocks included); loading re-validates
// causality.  Numbers are written with enough digits to round-trip exactly.
std::string policy_to_json(const LinearPolicy& policy);
LinearPolicy parse_policy(const std::string& text);
LinearPolicy load_policy(const std::string& path);
void save_policy(const std::string& path, const LinearPolicy& policy);

// Moment files carry {mean_v, cov_v, mean_w, cov_w}.
std::string moments_to_json(const NoiseMoments& moments);
NoiseMoments parse_moments(const std::string& text);
NoiseMoments load_moments(const std::string& path);
void save_moments(const std::string& path, const NoiseMoments& moments);

// Human-facing reports: 12 significant digits, '.' decimal separator, no
// locale dependence.  An infinite multiplier serializes as the string "inf".
std::string worst_case_report_json(const WorstCaseSolution& solution);
std::string equilibrium_report_json(const Equilibrium& eq);
std::string trace_csv(const std::vector<EquilibriumTraceRow>& trace);
std::string example_report_csv(const ExampleReport& report);

std::string format_number(double value);  // 12 significant digits

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace drlqg
