#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace drlqg {

// Command implementations behind the command-line front end.  Each returns
// a process exit code: 0 on success, 1 on configuration/input errors
// (malformed files, missing fields, shape or causality violations), 2 on
// solver failures (non-convergence, degenerate references).  Human-readable
// summaries go to stdout, error explanations to stderr; when out_dir is
// non-empty, machine-readable artifacts are written there.

// Runs the full synthesis (iterated best response) on the config and writes
// policy.json, moments.json, report.json, and trace.csv.
int cmd_synthesize(const std::string& config_path, const std::string& out_dir,
                   std::optional<double> tolerance_override = std::nullopt);

// Solves the worst-case noise problem for a fixed policy file and writes
// report.json and moments.json.
int cmd_worst_case(const std::string& config_path,
                   const std::string& policy_path, const std::string& out_dir,
                   std::optional<double> tolerance_override = std::nullopt);

// Monte Carlo evaluation of a policy file under a sampler spec:
//   "reference"       zero-mean Gaussians at the config's reference covariances
//   "gaussian@FILE"   Gaussians at the moments stored in FILE
//   "dirac@FILE"      point masses at the means stored in FILE
// Writes evaluate.csv with the empirical mean/stderr and the analytic
// expected cost side by side.
int cmd_evaluate(const std::string& config_path, const std::string& policy_path,
                 const std::string& sampler_spec, long long n_samples,
                 std::optional<std::uint64_t> seed_override,
                 const std::string& out_dir);

// Emits the four-row motivating-example report as CSV (stdout, plus
// example.csv under out_dir when given).
int cmd_example(const std::string& out_dir);

}  // namespace drlqg
