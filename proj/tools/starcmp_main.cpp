#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "starcmp/report_io.hpp"
#include "starcmp/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Robin Poisson comparison-principle certification harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "run the scenario suite from a JSON config");
  run->add_option("--config", config_path, "path to the suite config")->required();
  run->add_option("--out", out_dir, "output directory (overrides config)");
  run->add_option("--jobs", jobs, "scenario-level parallelism");

  std::string preset = "default";
  std::uint64_t seed = 1;
  std::string suite_out = "out";
  auto* suite = app.add_subcommand("suite", "run a built-in scenario preset");
  suite->add_option("--preset", preset, "preset name (default)");
  suite->add_option("--seed", seed, "base seed for the preset scenarios");
  suite->add_option("--out", suite_out, "output directory");
  suite->add_option("--jobs", jobs, "scenario-level parallelism");

  std::string cal_domain = "annulus2d";
  int cal_levels = 4;
  std::uint64_t cal_seed = 1;
  auto* cal = app.add_subcommand(
      "calibrate", "refinement sweep; prints the fitted tolerance constant");
  cal->add_option("--domain", cal_domain, "domain kind");
  cal->add_option("--levels", cal_levels, "number of refinement levels")
      ->check(CLI::Range(2, 6));
  cal->add_option("--seed", cal_seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      starcmp::SuiteConfig config = starcmp::load_config(config_path);
      if (!out_dir.empty()) config.out_dir = out_dir;
      if (jobs > 0) config.jobs = jobs;
      return starcmp::run_suite(config, std::cout);
    }
    if (suite->parsed()) {
      if (preset != "default") {
        std::cerr << "error: unknown preset '" << preset << "'\n";
        return 2;
      }
      starcmp::SuiteConfig config = starcmp::default_suite(seed);
      config.out_dir = suite_out;
      if (jobs > 0) config.jobs = jobs;
      return starcmp::run_suite(config, std::cout);
    }
    if (cal->parsed()) {
      starcmp::calibrate_domain(starcmp::domain_from_string(cal_domain),
                                cal_levels, cal_seed, std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
