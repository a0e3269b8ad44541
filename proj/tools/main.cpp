#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinnet/run_description.hpp"
#include "spinnet/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic state transfer and entanglement distribution on "
               "anti-ferromagnetic Heisenberg spin networks"};
  app.set_version_flag("--version", std::string("spinnet ") + spinnet::kVersion);
  app.require_subcommand(1);

  std::string file;
  spinnet::CliOptions options;

  auto add_common = [&](CLI::App* cmd, bool needs_file) {
    if (needs_file) cmd->add_option("file", file, "run description (JSON)")->required();
    cmd->add_option("--output", options.output, "write the result table/report here");
    cmd->add_option("--threads", options.threads, "worker threads where supported");
    cmd->add_option("--steps", options.steps, "fixed time steps (0 = adaptive)");
    cmd->add_option("--samples", options.samples, "number of time samples");
    cmd->add_option("--k", options.k, "number of levels");
  };

  CLI::App* check = app.add_subcommand("check", "statically verify a protocol description");
  add_common(check, true);
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "level and gap trace along the schedule (CSV)");
  add_common(spectrum, true);
  CLI::App* evolve = app.add_subcommand("evolve", "propagate the protocol and report errors");
  add_common(evolve, true);
  CLI::App* sweep = app.add_subcommand("sweep", "star-graph transfer sweep over M and T (CSV)");
  add_common(sweep, true);

  CLI::App* cg = app.add_subcommand("cg", "total-spin multiplicity of a spin list");
  std::vector<int> twice_spins;
  int twice_s = 0;
  cg->add_option("twice_spins", twice_spins, "site spins as doubled integers")->required();
  cg->add_option("--s", twice_s, "target total spin, doubled")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (check->parsed()) return spinnet::cmd_check(file, options, std::cout);
  if (spectrum->parsed()) return spinnet::cmd_spectrum(file, options, std::cout);
  if (evolve->parsed()) return spinnet::cmd_evolve(file, options, std::cout);
  if (sweep->parsed()) return spinnet::cmd_sweep(file, options, std::cout);
  if (cg->parsed()) return spinnet::cmd_cg(twice_spins, twice_s, std::cout);
  return 2;
}
