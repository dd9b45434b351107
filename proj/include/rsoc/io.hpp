#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsoc/config.hpp"
#include "rsoc/policy.hpp"
#include "rsoc/reflected_sde.hpp"
#include "rsoc/value_field.hpp"

namespace rsoc::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// %.17g
std::string fmt(double v);

/// Writes via a temporary file in the same directory and renames it over
/// `path`. Throws std::runtime_error with the OS message on failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const json& j);

/// Header lines start with '#'; rows are (slice, theta, log_scale, node, x_1..x_d, w).
std::string value_field_csv(const ValueField& field);
ValueField read_value_field_csv(const std::string& text);

/// One row per node: (node, x_1..x_d, action, w_1..w_n).
std::string policy_csv(const Policy& policy);
/// Rows (path_id, step, t, x_1..x_d, xi, w_1..w_n); the weights are those
/// applied on [t, t + dt) and are empty on the last row.
std::string paths_csv(const std::vector<PathBundle>& paths);

json summary(Command command, const std::string& status, json results, const std::vector<std::string>& warnings);
json error_json(const std::string& kind, const std::string& message, int exit_code);
json manifest(const RunConfig& cfg, Command command, double wall_seconds, const std::vector<std::string>& outputs);

}  // namespace rsoc::io
