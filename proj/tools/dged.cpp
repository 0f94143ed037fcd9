// Command-line driver for the generalized exchange-driven cluster simulator.
//
//   dged simulate        --config run.json --out results/
//   dged audit-kernel    --config run.json --cap 30 [--out results/]
//   dged sweep-truncation --config run.json --n-list 16,32,64 --out results/
//   dged equilibrium     --config run.json --rho 1.0 [--out results/]
//
// Exit codes: 0 ok, 2 config error, 3 kernel-audit failure, 4 integrator
// abort, 5 sweep finished with failed runs.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dged/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Truncated generalized exchange-driven cluster kinetics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int cap = 30;
  std::vector<int> n_list;
  double rho = 0.0;
  bool rho_set = false;

  auto* simulate = app.add_subcommand("simulate", "integrate a configured run");
  simulate->add_option("--config", config_path, "JSON run configuration")->required();
  simulate->add_option("--out", out_dir, "output directory")->required();

  auto* audit = app.add_subcommand("audit-kernel", "structural audit and optional certificate");
  audit->add_option("--config", config_path, "JSON run configuration")->required();
  audit->add_option("--cap", cap, "audit all indices up to this cap");
  audit->add_option("--out", out_dir, "optional output directory for audit.json");

  auto* sweep = app.add_subcommand("sweep-truncation", "convergence-in-N study");
  sweep->add_option("--config", config_path, "JSON run configuration")->required();
  sweep->add_option("--n-list", n_list, "comma-separated truncations")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory")->required();

  auto* equilibrium = app.add_subcommand("equilibrium", "detailed-balance equilibrium for a mass");
  equilibrium->add_option("--config", config_path, "JSON run configuration")->required();
  equilibrium->add_option("--rho", rho, "target mass")->each([&](const std::string&) {
    rho_set = true;
  });
  equilibrium->add_option("--out", out_dir, "optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : dged::cli::kExitConfig;
  }

  if (simulate->parsed()) return dged::cli::cmd_simulate(config_path, out_dir, std::cerr);
  if (audit->parsed())
    return dged::cli::cmd_audit_kernel(config_path, cap, out_dir, std::cout, std::cerr);
  if (sweep->parsed()) return dged::cli::cmd_sweep_truncation(config_path, n_list, out_dir, std::cerr);
  if (equilibrium->parsed())
    return dged::cli::cmd_equilibrium(config_path, rho_set ? std::optional<double>(rho) : std::nullopt,
                                      out_dir, std::cout, std::cerr);
  return dged::cli::kExitConfig;
}
