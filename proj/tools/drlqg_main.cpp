#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "drlqg/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Distributionally robust LQG: synthesis, worst-case analysis, and "
      "Monte Carlo evaluation"};
  app.require_subcommand(1);

  std::string config, policy, out_dir, sampler = "reference";
  long long samples = 100000;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  int rc = 0;

  CLI::App* syn = app.add_subcommand(
      "synthesize", "Compute the robust policy / worst-case noise pair");
  syn->add_option("--config", config, "Problem configuration (JSON)")
      ->required();
  syn->add_option("--out-dir", out_dir, "Directory for result files")
      ->required();
  syn->add_option("--tolerance", tolerance, "Override the solver tolerance");
  syn->callback([&] { rc = drlqg::cmd_synthesize(config, out_dir, tolerance); });

  CLI::App* wc = app.add_subcommand(
      "worst-case", "Worst-case noise distribution for a fixed policy");
  wc->add_option("--config", config, "Problem configuration (JSON)")
      ->required();
  wc->add_option("--policy", policy, "Policy file (JSON)")->required();
  wc->add_option("--out-dir", out_dir, "Directory for result files");
  wc->add_option("--tolerance", tolerance, "Override the solver tolerance");
  wc->callback(
      [&] { rc = drlqg::cmd_worst_case(config, policy, out_dir, tolerance); });

  CLI::App* ev = app.add_subcommand(
      "evaluate", "Monte Carlo evaluation of a policy under a noise sampler");
  ev->add_option("--config", config, "Problem configuration (JSON)")
      ->required();
  ev->add_option("--policy", policy, "Policy file (JSON)")->required();
  ev->add_option("--sampler", sampler,
                 "Sampler spec: reference | gaussian@FILE | dirac@FILE");
  ev->add_option("--samples", samples, "Number of rollouts");
  ev->add_option("--seed", seed, "Stream seed (defaults to the config seed)");
  ev->add_option("--out-dir", out_dir, "Directory for result files");
  ev->callback([&] {
    rc = drlqg::cmd_evaluate(config, policy, sampler, samples, seed, out_dir);
  });

  CLI::App* ex = app.add_subcommand(
      "example", "Reproduce the two-step motivating example report");
  ex->add_option("--out-dir", out_dir, "Directory for result files");
  ex->callback([&] { rc = drlqg::cmd_example(out_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return rc;
}
