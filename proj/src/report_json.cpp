#include "rsoc/report_json.hpp"

#include <cmath>

namespace rsoc {
namespace {

// JSON has no infinities; map them to null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const Vec& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json to_json(const EllipticityReport& r) {
  return {{"min_quadratic_form", num(r.min_quadratic_form)},
          {"min_random_direction", num(r.min_random_direction)},
          {"delta", r.delta},
          {"pass", r.pass}};
}

json to_json(const ReflectionReport& r) {
  return {{"min_gamma_dot_n", num(r.min_gamma_dot_n)},
          {"eta", r.eta},
          {"worst_node", r.worst_node},
          {"worst_face", r.worst_face},
          {"pass", r.pass}};
}

json to_json(const BoundsReport& r) {
  return {{"upper_slack", num(r.upper_slack)},
          {"lower_slack", num(r.lower_slack)},
          {"derivative_slack", num(r.derivative_slack)},
          {"theta_monotone", r.theta_monotone},
          {"pass", r.pass}};
}

json to_json(const RepresentationReport& r) {
  return {{"theta", r.theta},
          {"kappa", r.kappa},
          {"horizon", r.horizon},
          {"log_u_pde", r.log_u_pde},
          {"log_u_mc", r.log_u_mc},
          {"mc_std_error", r.mc_std_error},
          {"pde_error", r.pde_error},
          {"relative_gap", r.relative_gap},
          {"error_bar", r.error_bar},
          {"n_paths", r.n_paths},
          {"pass", r.pass}};
}

json to_json(const CostEstimate& r) {
  json per = json::array();
  for (const HorizonValue& h : r.per_horizon)
    per.push_back({{"horizon", h.horizon}, {"value", num(h.value)}, {"std_error", num(h.std_error)}});
  return {{"value", num(r.value)},
          {"value_std_error", num(r.value_std_error)},
          {"log_mean", num(r.log_mean)},
          {"std_error", num(r.std_error)},
          {"n_paths", r.n_paths},
          {"horizon", r.horizon},
          {"contaminated_fraction", r.contaminated_fraction},
          {"tail_bound", r.tail_bound},
          {"per_horizon", per},
          {"settled", r.settled},
          {"warnings", r.warnings}};
}

json to_json(const DppReport& r) {
  return {{"log_lhs", num(r.log_lhs)},   {"log_u", num(r.log_u)},   {"residual", num(r.residual)},
          {"std_error", num(r.std_error)}, {"mean_tau", r.mean_tau}, {"n_paths", r.n_paths}};
}

json to_json(const RhoEstimate& r) {
  json table = json::array();
  for (const RhoEntry& e : r.table)
    table.push_back({{"k", e.k},
                     {"alpha", e.alpha},
                     {"rho_candidate", e.rho_candidate},
                     {"spatial_variation", e.spatial_variation},
                     {"phi_bound_slack", e.phi_bound_slack},
                     {"phi_bound_pass", e.phi_bound_pass},
                     {"harnack_ratio", num(e.harnack_ratio)},
                     {"bounds_pass", e.bounds_pass}});
  json rk = json::array();
  for (std::size_t i = 0; i < r.ks.size(); ++i) rk.push_back({{"k", r.ks[i]}, {"rho_k", r.rho_k[i]}});
  return {{"rho", r.rho},
          {"theta", r.theta},
          {"k_final", r.k_final},
          {"rho_k", rk},
          {"table", table},
          {"variation_decreasing", r.variation_decreasing},
          {"warnings", r.warnings}};
}

json to_json(const ErgodicResidual& r) {
  return {{"interior_max", num(r.interior_max)},
          {"worst_node", r.worst_node},
          {"boundary_max", num(r.boundary_max)},
          {"policy_interior_max", num(r.policy_interior_max)}};
}

json to_json(const NearMonotoneReport& r) {
  return {{"shell_min", num(r.shell_min)}, {"rho", r.rho}, {"pass", r.pass}, {"label", r.label}};
}

json to_json(const HitReport& r) {
  return {{"fraction", r.fraction},   {"ci_lo", r.interval.lo}, {"ci_hi", r.interval.hi},
          {"mean_time", r.mean_time}, {"hits", r.hits},         {"n_paths", r.n_paths}};
}

json to_json(const RecurrenceReport& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.radii.size(); ++i) rows.push_back({{"R", r.radii[i]}, {"phi", r.phi_at_query[i]}});
  json j = {{"target", {{"center", to_json(r.target.center)}, {"radius", r.target.radius}}},
            {"query", to_json(r.query)},
            {"phi_R", rows},
            {"limit_estimate", r.limit_estimate},
            {"monotone_in_R", r.monotone_in_R},
            {"verdict", to_string(r.verdict)}};
  if (r.mc) j["mc"] = to_json(*r.mc);
  return j;
}

json to_json(const MartingaleReport& r) {
  json fs = json::array();
  for (const FunctionResidual& f : r.functions) {
    json inc = json::array();
    for (const IncrementStat& s : f.increments)
      inc.push_back({{"s", s.s},
                     {"t", s.t},
                     {"mean", s.mean},
                     {"std_error", s.std_error},
                     {"z", num(s.z)},
                     {"slope_z", num(s.slope_z)}});
    fs.push_back({{"name", f.name},
                  {"boundary_ok", f.boundary_ok},
                  {"boundary_margin", num(f.boundary_margin)},
                  {"increments", inc},
                  {"max_z", num(f.max_z)},
                  {"pass", f.pass}});
  }
  return {{"functions", fs}, {"max_z", num(r.max_z)}, {"pass", r.pass}};
}

json to_json(const PathInvariantReport& r) {
  return {{"confined", r.confined},
          {"xi_monotone", r.xi_monotone},
          {"complementary", r.complementary},
          {"complementarity_mass", r.complementarity_mass}};
}

}  // namespace rsoc
