#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbm/reports.hpp"

// exit codes: 0 success, 2 configuration or validation error, 3 numerical
// failure inside an experiment
int main(int argc, char** argv) {
  CLI::App app{"full-branch interval maps with two neutral endpoints"};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir, experiment;
  uint64_t seed = 0;
  int workers = 0;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  auto* workers_opt = app.add_option("--workers", workers, "worker cap (runs are serial)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* exp_opt = app.add_option("--experiment", experiment, "experiment to run");
  CLI::App* report_cmd = app.add_subcommand("report", "run the whole battery");
  report_cmd->fallthrough();  // global flags may follow the subcommand

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    fbm::RunConfig c = fbm::load_config(config_path);
    if (seed_opt->count()) c.seed = seed;
    if (workers_opt->count()) {
      if (workers <= 0) throw fbm::DomainError("--workers must be positive");
      c.workers = workers;
    }
    if (out_opt->count()) c.out_dir = out_dir;
    if (exp_opt->count()) {
      if (!fbm::valid_experiment(experiment))
        throw fbm::DomainError("unknown experiment '" + experiment + "'");
      c.experiment = experiment;
    }
    if (report_cmd->parsed()) c.experiment = "report";

    fbm::ExperimentOutput out = fbm::run_experiment(c);
    for (const auto& p : fbm::write_outputs(c, out))
      std::cerr << "wrote " << p << "\n";
    std::cout << out.doc.dump(2) << "\n";
    return 0;
  } catch (const fbm::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fbm::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
