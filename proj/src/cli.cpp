#include "drlqg/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <utility>

#include "drlqg/equilibrium.hpp"
#include "drlqg/errors.hpp"
#include "drlqg/linalg.hpp"
#include "drlqg/serialization.hpp"
#include "drlqg/sim_eval.hpp"
#include "drlqg/stacked.hpp"

namespace drlqg {

namespace {

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const SingularSystemError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

std::string joined(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void apply_tolerance(RunConfig& cfg, const std::optional<double>& tol) {
  if (tol) {
    if (!(*tol > 0.0)) throw ConfigError("tolerance must be positive");
    cfg.solver.tolerance = *tol;
  }
}

// The worst-case pushforward is only defined around a positive definite
// reference; fail with exit code 2 and a pointed message otherwise.
bool references_degenerate(const AmbiguitySpec& amb) {
  const double scale_v = std::max(1.0, amb.cov_v_ref.cwiseAbs().maxCoeff());
  const double scale_w = std::max(1.0, amb.cov_w_ref.cwiseAbs().maxCoeff());
  return min_eigenvalue(sym(amb.cov_v_ref)) <= 1e-12 * scale_v ||
         min_eigenvalue(sym(amb.cov_w_ref)) <= 1e-12 * scale_w;
}

std::pair<NoiseSampler, NoiseSampler> make_samplers(
    const RunConfig& cfg, const std::string& sampler_spec) {
  const int n = cfg.problem.state_dim();
  const int p = cfg.problem.output_dim();
  if (sampler_spec == "reference") {
    return {NoiseSampler::gaussian(Eigen::VectorXd::Zero(n),
                                   cfg.ambiguity.cov_v_ref),
            NoiseSampler::gaussian(Eigen::VectorXd::Zero(p),
                                   cfg.ambiguity.cov_w_ref)};
  }
  const auto at = sampler_spec.find('@');
  if (at != std::string::npos) {
    const std::string kind = sampler_spec.substr(0, at);
    const std::string path = sampler_spec.substr(at + 1);
    const NoiseMoments moments = load_moments(path);
    if (moments.mean_v.size() != n || moments.mean_w.size() != p)
      throw DimensionError("sampler moments do not match the problem dimensions");
    if (kind == "gaussian")
      return {NoiseSampler::gaussian(moments.mean_v, moments.cov_v),
              NoiseSampler::gaussian(moments.mean_w, moments.cov_w)};
    if (kind == "dirac")
      return {NoiseSampler::dirac(moments.mean_v),
              NoiseSampler::dirac(moments.mean_w)};
    throw ConfigError("unknown sampler kind \"" + kind + "\"");
  }
  throw ConfigError("unknown sampler kind \"" + sampler_spec + "\"");
}

}  // namespace

int cmd_synthesize(const std::string& config_path, const std::string& out_dir,
                   std::optional<double> tolerance_override) {
  return guarded([&] {
    RunConfig cfg = load_config(config_path);
    apply_tolerance(cfg, tolerance_override);
    EquilibriumOptions opts;
    opts.inner = cfg.solver;
    opts.max_rounds = cfg.max_rounds;
    opts.gap_seed = cfg.seed == 0 ? opts.gap_seed : cfg.seed;
    const Equilibrium eq =
        iterated_best_response(cfg.problem, cfg.ambiguity, opts);

    std::printf("value %s\ngap %s\nrounds %d\n",
                format_number(eq.value).c_str(), format_number(eq.gap).c_str(),
                eq.rounds);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      save_policy(joined(out_dir, "policy.json"), eq.policy);
      save_moments(joined(out_dir, "moments.json"), eq.nature);
      write_text_file(joined(out_dir, "report.json"),
                      equilibrium_report_json(eq));
      write_text_file(joined(out_dir, "trace.csv"), trace_csv(eq.trace));
    }
    return 0;
  });
}

int cmd_worst_case(const std::string& config_path,
                   const std::string& policy_path, const std::string& out_dir,
                   std::optional<double> tolerance_override) {
  return guarded([&] {
    RunConfig cfg = load_config(config_path);
    apply_tolerance(cfg, tolerance_override);
    const LinearPolicy policy = load_policy(policy_path);
    if (policy.horizon != cfg.problem.horizon ||
        policy.m != cfg.problem.input_dim() ||
        policy.p != cfg.problem.output_dim())
      throw DimensionError("policy file dimensions do not match the config");
    if (references_degenerate(cfg.ambiguity)) {
      std::fprintf(stderr,
                   "error: reference covariances must be positive definite; "
                   "the worst-case pushforward is undefined around a "
                   "degenerate reference\n");
      return 2;
    }

    const StackedMatrices stacked = assemble_stacked(cfg.problem);
    const NoiseQuadratic nq =
        aggregate_noise_matrices(f_matrices(stacked, policy, cfg.problem.x0));
    const WorstCaseSolution solution =
        solve_worst_case(nq, cfg.ambiguity, cfg.solver);

    std::printf("lambda_v %s\nlambda_w %s\ncost_core %s\ncost %s\n",
                format_number(solution.lambda_v).c_str(),
                format_number(solution.lambda_w).c_str(),
                format_number(solution.cost_core).c_str(),
                format_number(solution.cost).c_str());
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      write_text_file(joined(out_dir, "report.json"),
                      worst_case_report_json(solution));
      save_moments(joined(out_dir, "moments.json"), solution.moments);
    }
    return 0;
  });
}

int cmd_evaluate(const std::string& config_path, const std::string& policy_path,
                 const std::string& sampler_spec, long long n_samples,
                 std::optional<std::uint64_t> seed_override,
                 const std::string& out_dir) {
  return guarded([&] {
    const RunConfig cfg = load_config(config_path);
    const LinearPolicy policy = load_policy(policy_path);
    if (n_samples < 1) throw ConfigError("sample count must be at least 1");
    const std::uint64_t seed = seed_override.value_or(cfg.seed);
    const auto [v_sampler, w_sampler] = make_samplers(cfg, sampler_spec);

    const MonteCarloResult mc = monte_carlo_cost(
        cfg.problem, policy, v_sampler, w_sampler, n_samples, seed);
    NoiseMoments moments;
    moments.mean_v = v_sampler.mean();
    moments.cov_v = v_sampler.covariance();
    moments.mean_w = w_sampler.mean();
    moments.cov_w = w_sampler.covariance();
    const StackedMatrices stacked = assemble_stacked(cfg.problem);
    const double analytic = expected_cost(
        aggregate_noise_matrices(f_matrices(stacked, policy, cfg.problem.x0)),
        moments);

    std::string csv = "mc_mean,mc_stderr,analytic,n_samples,seed\n";
    csv += format_number(mc.mean) + "," + format_number(mc.stderr_) + "," +
           format_number(analytic) + "," + std::to_string(n_samples) + "," +
           std::to_string(seed) + "\n";
    std::fputs(csv.c_str(), stdout);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      write_text_file(joined(out_dir, "evaluate.csv"), csv);
    }
    return 0;
  });
}

int cmd_example(const std::string& out_dir) {
  return guarded([&] {
    const std::string csv = example_report_csv(reproduce_motivating_example());
    std::fputs(csv.c_str(), stdout);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      write_text_file(joined(out_dir, "example.csv"), csv);
    }
    return 0;
  });
}

}  // namespace drlqg
