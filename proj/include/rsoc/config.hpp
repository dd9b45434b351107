#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rsoc/domain_model.hpp"

namespace rsoc {

enum class Command { simulate, solve_discounted, solve_ergodic, probe_recurrence, verify, suite };

/// Throws ValidationError for an unknown command name.
Command parse_command(const std::string& name);
const char* to_string(Command c) noexcept;

struct Numerics {
  double dtheta = 0.0;  // 0: automatic
  std::size_t max_slices = 400;
  double dt = 1e-2;
  double horizon = 1.0;
  std::size_t n_paths = 1000;
  std::vector<double> alphas{1.0, 0.5, 0.25, 0.125, 0.0625};
  std::vector<double> ks{4.0, 6.0};
  std::vector<double> ergodic_horizons{50.0, 100.0, 200.0};
  std::size_t ergodic_paths = 1000;
  std::vector<double> radii;  // empty: 12, 24, ..., 768 beyond the target
  std::optional<Vec> target_center;
  std::optional<double> target_radius;
  std::optional<Vec> query;
  double eps_rec = 0.01;
  double t_cap = 50.0;
  std::vector<double> checkpoints{0.5, 1.0};
  double dpp_exit_side = 1.0;
  double dpp_t_cap = 1.0;
  double mc_kappa = 1e-3;  // kappa for the discounted Monte Carlo cross-check
};

struct RunOptions {
  std::uint64_t seed = 0;
  /// optimal | constant
  std::string policy = "optimal";
  std::vector<double> policy_weights;  // for constant
  std::vector<std::vector<double>> compare_policies;  // extra constant policies for the ergodic sandwich
  bool write_paths = true;
};

struct RunConfig {
  ModelSpec model;
  Numerics numerics;
  RunOptions run;
  /// Parsed key/value pairs per section as written, for the manifest echo.
  std::map<std::string, std::map<std::string, std::string>> echo;
  std::string source_text;
};

/// Parses an INI file with sections [model], [numerics] and [run]. Unknown
/// sections or keys are rejected; every error names the key and the broken
/// constraint. Parse errors carry the line number.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

}  // namespace rsoc
