#include "rsoc/suite.hpp"

#include <algorithm>
#include <cmath>

#include "rsoc/cost_functionals.hpp"
#include "rsoc/errors.hpp"
#include "rsoc/hjb_discounted.hpp"
#include "rsoc/hjb_ergodic.hpp"
#include "rsoc/report_json.hpp"
#include "rsoc/verification.hpp"

namespace rsoc {

Ball configured_target(const RunConfig& cfg) {
  Ball b = default_target(cfg.model.domain);
  if (cfg.numerics.target_center) b.center = *cfg.numerics.target_center;
  if (cfg.numerics.target_radius) b.radius = *cfg.numerics.target_radius;
  return b;
}

Vec configured_query(const RunConfig& cfg, const Ball& target) {
  if (cfg.numerics.query) return *cfg.numerics.query;
  Vec q = target.center;
  q[0] += target.radius + 1.0;
  return q;
}

std::vector<double> configured_radii(const RunConfig& cfg, const Ball& target) {
  if (!cfg.numerics.radii.empty()) return cfg.numerics.radii;
  const double b = norm(target.center) + target.radius;
  const int count = cfg.model.domain.dim == 1 ? 7 : 3;
  std::vector<double> out;
  for (int j = 0; j < count; ++j) out.push_back(b + 12.0 * std::pow(2.0, j));
  return out;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const SuiteCheck& c : checks)
    cs.push_back({{"name", c.name}, {"pass", c.pass}, {"gating", c.gating}, {"detail", c.detail}});
  return {{"verdict", pass ? "PASS" : "FAIL"}, {"rho", rho}, {"checks", cs}};
}

namespace {

McOptions mc_options(const RunConfig& cfg, Exec exec, std::uint64_t stream) {
  return {cfg.numerics.dt, cfg.numerics.n_paths, split_seed(cfg.run.seed, stream), exec};
}

DiscountedOptions solve_options(const RunConfig& cfg, Exec exec) {
  DiscountedOptions o;
  o.dtheta = cfg.numerics.dtheta;
  o.max_slices = cfg.numerics.max_slices;
  o.exec = exec;
  return o;
}

}  // namespace

SuiteReport end_to_end_suite(const RunConfig& cfg, Exec exec) {
  SuiteReport rep;
  const ModelSpec& model = cfg.model;
  const Grid grid = model.grid();
  const Vec x0 = grid.coord(model.x0_index());
  auto add = [&](std::string name, bool pass, json detail, bool gating = true) {
    rep.checks.push_back({std::move(name), pass, gating, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      add(name, false, {{"error", e.what()}, {"kind", e.kind()}});
    }
  };
  auto finish = [&]() {
    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const SuiteCheck& c) { return c.pass || !c.gating; });
    return rep;
  };

  const EllipticityReport ell = check_ellipticity(model.coeffs, grid, 256, split_seed(cfg.run.seed, 1));
  add("check_ellipticity", ell.pass, to_json(ell));
  const ReflectionReport refl = check_reflection_angle(model.coeffs, grid);
  add("check_reflection_angle", refl.pass, to_json(refl));
  if (!ell.pass || !refl.pass) return finish();

  const DiscountedOptions sopt = solve_options(cfg, exec);
  ValueField field;
  bool have_field = false;
  guarded("solve_discounted", [&] {
    field = solve_discounted(model, sopt);
    have_field = true;
    const BoundsReport b = verify_bounds(field);
    json d = to_json(b);
    d["log_u_x0"] = field.log_u_at(model.theta, x0);
    d["steps"] = field.steps;
    add("verify_bounds", b.pass, d);
  });

  if (have_field) {
    guarded("policy_scaling_invariance", [&] {
      const HjbOperator op(model);
      ValueField scaled = field;
      for (ValueSlice& s : scaled.slices)
        for (double& v : s.w) v *= 2.0;
      const bool same = extract_policy(op, field, model.theta) == extract_policy(op, scaled, model.theta);
      add("policy_scaling_invariance", same, {{"identical", same}});
    });

    guarded("discounted_mc", [&] {
      ModelSpec mk = model;
      mk.kappa = std::min(cfg.numerics.mc_kappa, model.theta / 2.0);
      const ValueField fk = solve_discounted(mk, sopt);
      const ControlPolicy control = optimal_feedback(mk, fk, model.theta);
      const double horizon = 10.0 / model.alpha;
      const CostEstimate est = estimate_discounted_value(mk, control, x0, horizon, mc_options(cfg, exec, 2));
      const double log_u = fk.log_u_at(model.theta, x0);
      const double kappa_gap = mk.kappa * fk.cost_sup / model.alpha;
      const double tol = 3.0 * est.std_error + kappa_gap + model.theta * est.tail_bound + 0.01;
      const double gap = std::abs(est.log_mean - log_u);
      json d = to_json(est);
      d["log_u_pde"] = log_u;
      d["abs_log_gap"] = gap;
      d["tolerance"] = tol;
      add("discounted_mc", gap <= tol, d);
    });

    guarded("dpp_residual", [&] {
      const ControlPolicy control = optimal_feedback(model, field, model.theta);
      const Vec start = grid.coord(grid.nearest(Vec(model.domain.dim, cfg.numerics.dpp_exit_side / 2.0)));
      const DppReport d = dpp_residual(model, control, field, start, {cfg.numerics.dpp_exit_side, cfg.numerics.dpp_t_cap},
                                       mc_options(cfg, exec, 3));
      add("dpp_residual", std::abs(d.residual) <= 0.02, to_json(d));
    });
  }

  RhoEstimate rho;
  bool have_rho = false;
  guarded("vanishing_discount", [&] {
    VanishingOptions vo;
    vo.alphas = cfg.numerics.alphas;
    vo.ks = cfg.numerics.ks;
    vo.solve = sopt;
    rho = vanishing_discount_run(model, vo);
    have_rho = true;
    rep.rho = rho.rho;
    bool phi_ok = true;
    for (const RhoEntry& e : rho.table) phi_ok = phi_ok && e.phi_bound_pass && e.bounds_pass;
    add("vanishing_discount", phi_ok, to_json(rho));
    bool shrinks = true;
    for (double k : rho.ks) {
      double first = -1.0, last = -1.0;
      for (const RhoEntry& e : rho.table) {
        if (e.k != k) continue;
        if (first < 0.0) first = e.spatial_variation;
        last = e.spatial_variation;
      }
      shrinks = shrinks && (last < first || last <= 1e-12);
    }
    add("g_constancy", shrinks, {{"variation_decreasing_strict", rho.variation_decreasing}});
  });

  if (have_rho) {
    const ModelSpec mk = model.with_cost_cutoff(rho.k_final);
    guarded("ergodic_residual", [&] {
      const ErgodicResidual r = ergodic_residual(mk, rho.rho, rho.u_hat, &rho.policy());
      add("ergodic_residual", r.boundary_max <= 1e-8, to_json(r));
    });
    guarded("near_monotone", [&] {
      const NearMonotoneReport r = check_near_monotone(model.coeffs, rho.rho, model.domain);
      add("near_monotone", r.pass, to_json(r), false);
    });
    guarded("recurrence_audit", [&] {
      const Ball target = configured_target(cfg);
      const RecurrenceReport r = classify_recurrence(model, ControlPolicy::markov(rho.policy()), target,
                                                     configured_query(cfg, target), configured_radii(cfg, target),
                                                     cfg.numerics.eps_rec);
      add("recurrence_max_principle", r.monotone_in_R, {{"monotone_in_R", r.monotone_in_R}});
      add("recurrence_audit", r.verdict == Verdict::recurrent, to_json(r), false);
    });
    guarded("ergodic_sandwich", [&] {
      McOptions mc{cfg.numerics.dt, cfg.numerics.ergodic_paths, split_seed(cfg.run.seed, 4), exec};
      json d;
      const CostEstimate own = estimate_ergodic_value(mk, ControlPolicy::markov(rho.policy()), x0,
                                                      cfg.numerics.ergodic_horizons, mc);
      const bool b_ok = std::abs(rho.rho - own.value) <= 2.0 * own.value_std_error;
      d["extracted_truncated_cost"] = to_json(own);
      bool a_ok = true;
      json tested = json::array();
      std::vector<std::vector<double>> policies = cfg.run.compare_policies;
      if (policies.empty())
        for (int s = 0; s < model.actions.size(); ++s) policies.push_back(model.actions.vertex(s));
      std::vector<ControlPolicy> controls{ControlPolicy::markov(rho.policy())};
      for (const auto& w : policies) controls.push_back(ControlPolicy::constant(w));
      for (const ControlPolicy& c : controls) {
        const CostEstimate e = estimate_ergodic_value(model, c, x0, cfg.numerics.ergodic_horizons, mc);
        a_ok = a_ok && rho.rho <= e.value + 2.0 * e.value_std_error;
        tested.push_back(to_json(e));
      }
      d["tested_policies"] = tested;
      d["upper_sandwich"] = a_ok;
      d["extracted_agreement"] = b_ok;
      add("ergodic_sandwich", a_ok && b_ok, d, false);
    });
  }

  ControlPolicy control = ControlPolicy::constant(model.actions.vertex(0));
  if (have_field) control = ControlPolicy::markov(extract_policy(model, field, model.theta));

  guarded("martingale_residual", [&] {
    MartingaleTestSpec spec;
    spec.functions = test_function_catalog(model.domain.dim, model.domain.box_side);
    spec.checkpoints = cfg.numerics.checkpoints;
    spec.start = x0;
    const MartingaleReport r = martingale_residual(model, control, spec, mc_options(cfg, exec, 5));
    add("martingale_residual", r.pass, to_json(r));
  });

  guarded("path_invariants", [&] {
    const std::size_t n = std::min<std::size_t>(cfg.numerics.n_paths, 256);
    const auto paths = simulate_batch(model, control, x0, cfg.numerics.horizon, cfg.numerics.dt, n,
                                      split_seed(cfg.run.seed, 6), exec);
    bool ok = true;
    for (const PathBundle& p : paths) {
      const PathInvariantReport r = check_path_invariants(p, model.domain.step / 2.0);
      ok = ok && r.confined && r.xi_monotone && r.complementary;
    }
    const auto again = simulate_batch(model, control, x0, cfg.numerics.horizon, cfg.numerics.dt, n,
                                      split_seed(cfg.run.seed, 6), exec);
    bool same = true;
    for (std::size_t i = 0; i < n; ++i) same = same && paths[i].x == again[i].x && paths[i].xi == again[i].xi;
    add("path_invariants", ok, {{"n_paths", n}, {"all_hold", ok}});
    add("determinism", same, {{"bit_identical", same}});
  });

  return finish();
}

}  // namespace rsoc
