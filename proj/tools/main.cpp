#include <iostream>

#include <CLI11.hpp>

#include "hamdual/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian boundary value problems by minimizing a dual action"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::string param;
  std::vector<double> values;

  auto* check = app.add_subcommand("check", "Sample-based hypothesis checks");
  check->add_option("config", config, "problem configuration (JSON)")->required();

  auto* solve = app.add_subcommand("solve", "Solve and certify");
  solve->add_option("config", config, "problem configuration (JSON)")->required();
  solve->add_option("--out", out_dir, "output directory");
  solve->add_option("--seed", seed, "random seed");

  auto* sweep = app.add_subcommand("sweep", "Parameter sweep");
  sweep->add_option("config", config, "problem configuration (JSON)")->required();
  sweep->add_option("--param", param, "lambda, eps, M or T")->required();
  sweep->add_option("--values", values, "comma separated values")->required()->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hamdual::cli::kConfigFault;
  }

  try {
    if (*check) return hamdual::cli::cmd_check(config, std::cout, std::cerr);
    if (*solve) return hamdual::cli::cmd_solve(config, out_dir, seed, std::cout, std::cerr);
    return hamdual::cli::cmd_sweep(config, param, values, out_dir, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hamdual::cli::kConfigFault;
  }
}
