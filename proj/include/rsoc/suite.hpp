#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rsoc/config.hpp"
#include "rsoc/recurrence_probe.hpp"
#include "rsoc/reflected_sde.hpp"

namespace rsoc {

/// Target ball, query point and radius ladder of the recurrence probe, from
/// the config or the defaults (ball of radius L/10 at (L/4, ...), query one
/// unit beyond the ball along the first axis, radii b + 12 * 2^j).
Ball configured_target(const RunConfig& cfg);
Vec configured_query(const RunConfig& cfg, const Ball& target);
std::vector<double> configured_radii(const RunConfig& cfg, const Ball& target);

struct SuiteCheck {
  std::string name;
  bool pass = false;
  bool gating = true;  // non-gating checks are reported but do not decide the verdict
  nlohmann::json detail;
};

struct SuiteReport {
  std::vector<SuiteCheck> checks;
  bool pass = false;
  double rho = 0.0;
  nlohmann::json to_json() const;
};

/// Runs the configured model through every module and aggregates the
/// reports. Stops after a failed assumption check (ellipticity, reflection
/// angle), since the solvers are ill-posed then.
SuiteReport end_to_end_suite(const RunConfig& cfg, Exec exec = Exec::parallel);

}  // namespace rsoc
