// restriction-lab: command-line front end for the experiment drivers.
//
//   restriction-lab <norm|maximize|scan-m|endpoint-demo|diagnose> --config FILE [--key=value ...]

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlab/config.hpp"
#include "rlab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Discrete Fourier extension lab"};
  app.allow_extras();
  std::string command;
  std::string config_path;
  app.add_option("command", command, "norm, maximize, scan-m, endpoint-demo or diagnose")->required();
  app.add_option("--config", config_path, "experiment config file")->required();
  app.footer("Any config key can be overridden as --key=value or --section.key=value.");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rlab::kExitConfig;
  }

  rlab::ExperimentConfig cfg;
  try {
    cfg = rlab::parse_config(config_path, app.remaining(), rlab::command_from_string(command));
  } catch (const rlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rlab::kExitConfig;
  }
  return rlab::run_command(cfg, std::cout, std::cerr);
}
