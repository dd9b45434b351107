#include "rsoc/app.hpp"

#include <chrono>
#include <ostream>
#include <sstream>

#include "rsoc/cost_functionals.hpp"
#include "rsoc/errors.hpp"
#include "rsoc/hjb_discounted.hpp"
#include "rsoc/hjb_ergodic.hpp"
#include "rsoc/io.hpp"
#include "rsoc/recurrence_probe.hpp"
#include "rsoc/report_json.hpp"
#include "rsoc/suite.hpp"
#include "rsoc/verification.hpp"

namespace rsoc {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  std::string status = "ok";
  json results = json::object();
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;
  int exit_code = kOk;
};

DiscountedOptions solve_options(const RunConfig& cfg) {
  DiscountedOptions o;
  o.dtheta = cfg.numerics.dtheta;
  o.max_slices = cfg.numerics.max_slices;
  return o;
}

void emit(Outcome& out, const fs::path& dir, const std::string& name, const std::string& content) {
  io::write_atomic(dir / name, content);
  out.outputs.push_back(name);
}

ControlPolicy run_policy(const RunConfig& cfg) {
  if (cfg.run.policy == "constant") return ControlPolicy::constant(cfg.run.policy_weights);
  const ValueField field = solve_discounted(cfg.model, solve_options(cfg));
  return ControlPolicy::markov(extract_policy(cfg.model, field, cfg.model.theta));
}

Outcome cmd_simulate(const RunConfig& cfg, const fs::path& dir) {
  Outcome out;
  const ModelSpec& m = cfg.model;
  const Vec x0 = m.grid().coord(m.x0_index());
  const ControlPolicy policy = run_policy(cfg);
  const auto paths = simulate_batch(m, policy, x0, cfg.numerics.horizon, cfg.numerics.dt, cfg.numerics.n_paths,
                                    cfg.run.seed);
  bool ok = true;
  std::size_t outer = 0;
  std::vector<double> last(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const PathInvariantReport r = check_path_invariants(paths[i], m.domain.step / 2.0);
    ok = ok && r.confined && r.xi_monotone && r.complementary;
    outer += paths[i].touched_outer ? 1 : 0;
    last[i] = norm(paths[i].state(paths[i].steps));
  }
  const stats::MeanSe ms = stats::mean_se(last);
  out.results = {{"n_paths", paths.size()},
                 {"steps", paths.front().steps},
                 {"dt", cfg.numerics.dt},
                 {"horizon", cfg.numerics.horizon},
                 {"invariants_hold", ok},
                 {"mean_final_norm", ms.mean},
                 {"mean_final_norm_se", ms.std_error},
                 {"contaminated_fraction", static_cast<double>(outer) / static_cast<double>(paths.size())}};
  if (cfg.run.write_paths) emit(out, dir, "paths.csv", io::paths_csv(paths));
  return out;
}

Outcome cmd_solve_discounted(const RunConfig& cfg, const fs::path& dir) {
  Outcome out;
  const ModelSpec& m = cfg.model;
  const ValueField field = solve_discounted(m, solve_options(cfg));
  const Policy policy = extract_policy(m, field, m.theta);
  const BoundsReport b = verify_bounds(field);
  const double lu = field.log_u_at(m.theta, m.grid().coord(m.x0_index()));
  out.results = {{"theta", m.theta},
                 {"alpha", m.alpha},
                 {"kappa", m.kappa},
                 {"log_u_x0", lu},
                 {"u_x0", std::exp(lu)},
                 {"J_x0", lu / m.theta},
                 {"dtheta", field.dtau},
                 {"steps", field.steps},
                 {"slices", field.size()},
                 {"max_monotone_dtheta", max_monotone_dtheta(m)},
                 {"bounds", to_json(b)}};
  if (!b.pass) out.warnings.push_back("a-priori bounds violated");
  emit(out, dir, "value_field.csv", io::value_field_csv(field));
  emit(out, dir, "policy.csv", io::policy_csv(policy));
  return out;
}

Outcome cmd_solve_ergodic(const RunConfig& cfg, const fs::path& dir) {
  Outcome out;
  const ModelSpec& m = cfg.model;
  VanishingOptions vo;
  vo.alphas = cfg.numerics.alphas;
  vo.ks = cfg.numerics.ks;
  vo.solve = solve_options(cfg);
  const RhoEstimate rho = vanishing_discount_run(m, vo);
  const ErgodicResidual res = ergodic_residual(m.with_cost_cutoff(rho.k_final), rho.rho, rho.u_hat, &rho.policy());
  const NearMonotoneReport nm = check_near_monotone(m.coeffs, rho.rho, m.domain);
  out.results = to_json(rho);
  out.results["residual"] = to_json(res);
  out.results["near_monotone"] = to_json(nm);
  out.warnings = rho.warnings;
  const Grid g = m.grid();
  std::ostringstream uh;
  uh << "node";
  for (int i = 1; i <= g.dim(); ++i) uh << ",x_" << i;
  uh << ",u_hat\n";
  for (std::size_t p = 0; p < g.size(); ++p) {
    uh << p;
    const Vec x = g.coord(p);
    for (int i = 0; i < g.dim(); ++i) uh << "," << io::fmt(x[i]);
    uh << "," << io::fmt(rho.u_hat[p]) << "\n";
  }
  emit(out, dir, "u_hat.csv", uh.str());
  emit(out, dir, "policy.csv", io::policy_csv(rho.policy()));
  std::ostringstream tab;
  tab << "k,alpha,rho_candidate,spatial_variation,phi_bound_slack,harnack_ratio\n";
  for (const RhoEntry& e : rho.table)
    tab << io::fmt(e.k) << "," << io::fmt(e.alpha) << "," << io::fmt(e.rho_candidate) << ","
        << io::fmt(e.spatial_variation) << "," << io::fmt(e.phi_bound_slack) << "," << io::fmt(e.harnack_ratio)
        << "\n";
  emit(out, dir, "rho_table.csv", tab.str());
  return out;
}

Outcome cmd_probe_recurrence(const RunConfig& cfg, const fs::path& dir) {
  Outcome out;
  const ModelSpec& m = cfg.model;
  const ControlPolicy policy = run_policy(cfg);
  const Ball target = configured_target(cfg);
  const Vec query = configured_query(cfg, target);
  RecurrenceReport rep = classify_recurrence(m, policy, target, query, configured_radii(cfg, target),
                                             cfg.numerics.eps_rec);
  rep.mc = hitting_time_mc(m, policy, target, query, cfg.numerics.t_cap,
                           {cfg.numerics.dt, cfg.numerics.n_paths, cfg.run.seed, Exec::parallel});
  out.results = to_json(rep);
  std::ostringstream csv;
  csv << "R,phi_R\n";
  for (std::size_t i = 0; i < rep.radii.size(); ++i) csv << io::fmt(rep.radii[i]) << "," << io::fmt(rep.phi_at_query[i]) << "\n";
  emit(out, dir, "recurrence.csv", csv.str());
  return out;
}

Outcome cmd_verify(const RunConfig& cfg, const fs::path&) {
  Outcome out;
  const ModelSpec& m = cfg.model;
  const ControlPolicy policy = run_policy(cfg);
  MartingaleTestSpec spec;
  spec.functions = test_function_catalog(m.domain.dim, m.domain.box_side);
  spec.checkpoints = cfg.numerics.checkpoints;
  spec.start = m.grid().coord(m.x0_index());
  const MartingaleReport r =
      martingale_residual(m, policy, spec, {cfg.numerics.dt, cfg.numerics.n_paths, cfg.run.seed, Exec::parallel});
  out.results = to_json(r);
  out.status = r.pass ? "pass" : "fail";
  out.exit_code = r.pass ? kOk : kVerificationFail;
  return out;
}

Outcome cmd_suite(const RunConfig& cfg, const fs::path& dir) {
  Outcome out;
  const SuiteReport rep = end_to_end_suite(cfg);
  out.results = rep.to_json();
  out.status = rep.pass ? "pass" : "fail";
  out.exit_code = rep.pass ? kOk : kVerificationFail;
  io::write_json(dir / "verdict.json", out.results);
  out.outputs.push_back("verdict.json");
  return out;
}

std::string config_ini(const RunConfig& cfg) {
  std::ostringstream os;
  auto echo = cfg.echo;
  echo["run"]["seed"] = std::to_string(cfg.run.seed);
  for (const char* sec : {"model", "numerics", "run"}) {
    const auto it = echo.find(sec);
    if (it == echo.end()) continue;
    os << "[" << sec << "]\n";
    for (const auto& [k, v] : it->second) os << k << " = " << v << "\n";
    os << "\n";
  }
  return os.str();
}

}  // namespace

int run(Command command, RunConfig cfg, const fs::path& out_dir, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    fs::create_directories(out_dir);
    switch (command) {
      case Command::simulate:
        out = cmd_simulate(cfg, out_dir);
        break;
      case Command::solve_discounted:
        out = cmd_solve_discounted(cfg, out_dir);
        break;
      case Command::solve_ergodic:
        out = cmd_solve_ergodic(cfg, out_dir);
        break;
      case Command::probe_recurrence:
        out = cmd_probe_recurrence(cfg, out_dir);
        break;
      case Command::verify:
        out = cmd_verify(cfg, out_dir);
        break;
      case Command::suite:
        out = cmd_suite(cfg, out_dir);
        break;
    }
    io::write_atomic(out_dir / "config.ini", config_ini(cfg));
    io::write_json(out_dir / "summary.json", io::summary(command, out.status, out.results, out.warnings));
    out.outputs.insert(out.outputs.begin(), {"summary.json", "config.ini"});
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    io::write_json(out_dir / "manifest.json", io::manifest(cfg, command, wall, out.outputs));
  } catch (const Error& e) {
    log << "error (" << e.kind() << "): " << e.what() << "\n";
    try {
      io::write_json(out_dir / "error.json", io::error_json(e.kind(), e.what(), e.exit_code()));
    } catch (const std::exception&) {
    }
    return e.exit_code();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    try {
      io::write_json(out_dir / "error.json", io::error_json("io", e.what(), kSolver));
    } catch (const std::exception&) {
    }
    return kSolver;
  }
  for (const std::string& w : out.warnings) log << "warning: " << w << "\n";
  log << to_string(command) << ": " << out.status << " (" << out_dir.string() << ")\n";
  return out.exit_code;
}

int run_cli(Command command, const fs::path& config_path, const fs::path& out_dir, std::optional<std::uint64_t> seed,
            std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path.string());
    if (seed) {
      cfg.run.seed = *seed;
      cfg.model.seed = *seed;
    }
  } catch (const Error& e) {
    log << "error (" << e.kind() << "): " << e.what() << "\n";
    try {
      fs::create_directories(out_dir);
      io::write_json(out_dir / "error.json", io::error_json(e.kind(), e.what(), e.exit_code()));
    } catch (const std::exception&) {
    }
    return e.exit_code();
  }
  return run(command, std::move(cfg), out_dir, log);
}

}  // namespace rsoc
