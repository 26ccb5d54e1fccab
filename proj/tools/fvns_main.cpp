#include "fvns/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Implicit finite volume solver for barotropic Navier-Stokes on the periodic torus"};
  app.require_subcommand(1);

  std::optional<std::string> output_dir;
  app.add_option("--output-dir", output_dir, "Directory for CSV output (overrides output.dir)");

  std::string run_config;
  std::vector<std::string> run_overrides;
  auto* run = app.add_subcommand("run", "Run one case and write diagnostics, snapshots and a summary");
  run->add_option("--config", run_config, "Configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", run_overrides, "Override a key, e.g. solver.cfl=0.15")->allow_extra_args(false);
  run->add_option("--output-dir", output_dir, "Directory for CSV output (overrides output.dir)");

  std::string eoc_case;
  std::vector<fvns::Index> eoc_levels;
  std::optional<std::string> eoc_reference;
  std::string eoc_config;
  std::vector<std::string> eoc_overrides;
  auto* eoc = app.add_subcommand("eoc", "Refinement study: errors and convergence orders per level");
  eoc->add_option("--case", eoc_case, "Case name")->required();
  eoc->add_option("--levels", eoc_levels, "Cells per axis, e.g. 32,64,128")->required()->delimiter(',');
  eoc->add_option("--reference", eoc_reference, "exact or finest")->check(CLI::IsMember({"exact", "finest"}));
  eoc->add_option("--config", eoc_config, "Base configuration file")->required()->check(CLI::ExistingFile);
  eoc->add_option("--set", eoc_overrides, "Override a key of the base configuration")->allow_extra_args(false);
  eoc->add_option("--output-dir", output_dir, "Directory for CSV output (overrides output.dir)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return fvns::cmd_run(run_config, run_overrides, output_dir, std::cout, std::cerr);
  return fvns::cmd_eoc(eoc_case, eoc_levels, eoc_reference, eoc_config, eoc_overrides, output_dir, std::cout,
                       std::cerr);
}
