#include "delayvar/commands.hpp"

#include <CLI11.hpp>
#include <iostream>

int main(int argc, char** argv) {
  using namespace delayvar;
  CLI::App app{"Direct minimization and Euler-Lagrange verification for delay variational problems"};
  app.require_subcommand(1);

  CommandOptions opts;
  opts.log = log_level_from_env();
  std::string out_dir;
  std::uint64_t seed = 0;
  double threshold = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed (overrides solver.seed and identity.seed)");
  };
  auto* solve = app.add_subcommand("solve", "minimize J and write trajectory, EL report, summary and plot");
  common(solve);
  auto* verify = app.add_subcommand("verify", "check a stored trajectory against the Euler-Lagrange equation");
  common(verify);
  verify->add_option("trajectory", opts.trajectory, "trajectory.csv written by solve")->required();
  verify->add_option("--threshold", threshold, "residual_osc threshold (overrides verify.threshold)");
  auto* identity = app.add_subcommand("identity", "run the randomized identity suites");
  common(identity);
  auto* converge = app.add_subcommand("converge", "solve on every grid level and tabulate the residuals");
  common(converge);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::config_error;
  }

  auto* active = app.get_subcommands().front();
  if (active->count("--out")) opts.out_dir = out_dir;
  if (active->count("--seed")) opts.seed = seed;
  if (active == verify && verify->count("--threshold")) opts.threshold = threshold;

  if (active == solve) return cmd_solve(opts, std::cerr);
  if (active == verify) return cmd_verify(opts, std::cerr);
  if (active == identity) return cmd_identity(opts, std::cerr);
  return cmd_converge(opts, std::cerr);
}
