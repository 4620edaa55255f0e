#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace psys::cli;
  CLI::App app{"Coupled p-Laplacian system solver and checker"};
  app.require_subcommand(1);

  Options o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "Config file (flat key = value)")->required();
    sub->add_option("--out", o.out, "Output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "Random seed (overrides calibration.seed)");
  };

  auto* solve = app.add_subcommand("solve", "Picard solve, certificate and classification");
  auto* certify = app.add_subcommand("certify", "Calibrate C, certify and test ball invariance");
  auto* verify = app.add_subcommand("verify", "Classify stored fields and optionally run the shift test");
  auto* study = app.add_subcommand("study", "Discretization convergence study");
  for (auto* s : {solve, certify, verify, study}) common(s);
  verify->add_option("--alpha", o.alpha, "Shift of u (> 0)");
  verify->add_option("--beta", o.beta, "Shift of v (>= 0)");
  study->add_option("--resolutions", o.resolutions, "Comma-separated list, e.g. 16,32,64");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  if (solve->parsed()) return guarded("solve", cmd_solve, o, std::cerr);
  if (certify->parsed()) return guarded("certify", cmd_certify, o, std::cerr);
  if (verify->parsed()) return guarded("verify", cmd_verify, o, std::cerr);
  return guarded("study", cmd_study, o, std::cerr);
}
