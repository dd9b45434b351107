#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "rsoc/app.hpp"
#include "rsoc/config.hpp"
#include "rsoc/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive control of reflected diffusions in the orthant"};
  app.set_version_flag("--version", RSOC_VERSION);
  std::string command;
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  app.add_option("command", command,
                 "simulate | solve-discounted | solve-ergodic | probe-recurrence | verify | suite")
      ->required();
  app.add_option("--config", config, "INI config file")->required();
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "override the config seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : rsoc::kValidation;
  }
  rsoc::Command cmd;
  try {
    cmd = rsoc::parse_command(command);
  } catch (const rsoc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rsoc::kValidation;
  }
  return rsoc::run_cli(cmd, config, out, seed, std::cerr);
}
