// Acceptance criteria. `acceptance <n>` runs criterion n, `acceptance` runs all.
// One line per criterion: "criterion <n> <name>: PASS|FAIL <detail> [<seconds> s]".
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsoc/app.hpp"
#include "rsoc/config.hpp"
#include "rsoc/cost_functionals.hpp"
#include "rsoc/hjb_discounted.hpp"
#include "rsoc/hjb_ergodic.hpp"
#include "rsoc/recurrence_probe.hpp"
#include "rsoc/reflected_sde.hpp"
#include "rsoc/verification.hpp"

using namespace rsoc;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ModelSpec model(const std::string& text) { return parse_config("[model]\n" + text).model; }

ModelSpec canonical_1d(double h) { return model("step = " + num(h) + "\n"); }

ModelSpec rbm(double mu, double h) {
  return model("step = " + num(h) + "\nactions = a\ndrift = " + num(mu) + "\ncost = constant\ncost_value = 0\n");
}

// 1. u(1, x) = exp(theta c / alpha) for r = c.
Outcome constant_cost() {
  double worst = 0.0;
  const double exact = std::exp(1.0 * 1.0 / 0.5);
  for (const char* domain : {"dim = 1\nstep = 0.0625\n", "dim = 2\nbox_side = 6\nstep = 0.25\n"}) {
    const ModelSpec m =
        model(std::string(domain) + "cost = constant\ncost_value = 1\nalpha = 0.5\ntheta = 1\nkappa = 0.05\n");
    const ValueField f = solve_discounted(m);
    if (f.dtau > 1e-3) return {false, "dtheta " + num(f.dtau) + " > 1e-3"};
    for (std::size_t p = 0; p < f.grid().size(); ++p)
      worst = std::max(worst, std::abs(std::exp(f.log_u(f.size() - 1, p)) / exact - 1.0));
  }
  return {worst <= 0.01, "max |u/e^2 - 1| = " + num(worst)};
}

// 2. 1 <= u <= e^{theta ||r|| / alpha} and the theta-Lipschitz bound.
Outcome a_priori_bounds() {
  bool ok = true;
  std::string d;
  for (double a : {1.0, 0.5, 0.25}) {
    const BoundsReport r = verify_bounds(solve_discounted(canonical_1d(0.0625).with_alpha(a)));
    ok = ok && r.pass && r.upper_slack >= 0.0 && r.lower_slack >= 0.0 && r.derivative_slack >= 0.0;
    d += "alpha=" + num(a) + " slack(up,low,deriv)=(" + num(r.upper_slack) + "," + num(r.lower_slack) + "," +
         num(r.derivative_slack) + ") ";
  }
  return {ok, d};
}

// 3. u(theta, x0) against its Feynman-Kac form under the optimal feedback. The
// PDE error bar is the change between h = 1/32 and h = 1/64.
Outcome representation() {
  const ModelSpec coarse = canonical_1d(1.0 / 32);
  const ModelSpec fine = canonical_1d(1.0 / 64);
  const ValueField fc = solve_discounted(coarse);
  const ValueField ff = solve_discounted(fine);
  const Vec x0 = fine.x0;
  const double pde_error = std::abs(ff.log_u_at(1.0, x0) - fc.log_u_at(1.0, x0));
  const RepresentationReport r = representation_check(fine, ff, 100000, kSeed, 1e-3, pde_error);
  return {r.pass, "u_pde=" + num(std::exp(r.log_u_pde)) + " u_mc=" + num(std::exp(r.log_u_mc)) +
                      " rel_gap=" + num(r.relative_gap) + " 3*bar=" + num(3.0 * r.error_bar) +
                      " (mc " + num(r.mc_std_error) + ", pde " + num(pde_error) + ")"};
}

// 4. Dynamic programming with tau = exit of [0, 1] ^ 1.
Outcome dpp() {
  const ModelSpec m = canonical_1d(1.0 / 64);
  const ValueField f = solve_discounted(m);
  const Vec start{0.5};
  const McOptions mc{1e-3, 20000, kSeed, Exec::parallel};
  const DppReport opt = dpp_residual(m, optimal_feedback(m, f, m.theta), f, start, {1.0, 1.0}, mc);
  const DppReport up = dpp_residual(m, ControlPolicy::constant({0.0, 1.0}), f, start, {1.0, 1.0}, mc);
  const bool ok = std::abs(opt.residual) <= 0.02 && up.residual >= -2.0 * up.std_error;
  return {ok, "optimal R/u=" + num(opt.residual) + " (se " + num(opt.std_error) + "), constant +1 R/u=" +
                  num(up.residual) + " (se " + num(up.std_error) + ")"};
}

RhoEstimate canonical_rho() {
  static const RhoEstimate est = vanishing_discount_run(canonical_1d(0.0625), VanishingOptions{});
  return est;
}

// 5. rho below every tested policy, equal to the extracted one.
Outcome ergodic_sandwich() {
  const ModelSpec m = canonical_1d(0.0625);
  const RhoEstimate est = canonical_rho();
  const McOptions mc{1e-2, 10000, kSeed, Exec::parallel};
  const std::vector<double> horizons{50.0, 100.0, 200.0};
  struct Named {
    const char* name;
    ControlPolicy policy;
  };
  const std::vector<Named> policies{{"extracted", ControlPolicy::markov(est.policy())},
                                    {"down", ControlPolicy::constant({1.0, 0.0})},
                                    {"mixed", ControlPolicy::constant({0.5, 0.5})}};
  bool below = true, equal = true;
  std::string d = "rho=" + num(est.rho);
  for (const Named& p : policies) {
    const CostEstimate v = estimate_ergodic_value(m, p.policy, m.x0, horizons, mc);
    below = below && est.rho <= v.value + 2.0 * v.value_std_error;
    if (std::string(p.name) == "extracted") equal = std::abs(est.rho - v.value) <= 2.0 * v.value_std_error;
    d += std::string(" ") + p.name + "=" + num(v.value) + "+-" + num(v.value_std_error);
  }
  d += below ? " (a) ok" : " (a) violated";
  d += equal ? " (b) ok" : " (b) violated";
  return {below && equal, d};
}

// 6. Variation of g(1, .) strictly decreasing in alpha, phi bound everywhere.
Outcome g_constancy() {
  const RhoEstimate est = canonical_rho();
  bool decreasing = true, bound = true;
  std::string d;
  for (std::size_t i = 0; i < est.table.size(); ++i) {
    const RhoEntry& e = est.table[i];
    bound = bound && e.phi_bound_pass;
    if (i > 0 && est.table[i - 1].k == e.k && !(e.spatial_variation < est.table[i - 1].spatial_variation))
      decreasing = false;
    d += "(k=" + num(e.k) + ",a=" + num(e.alpha) + ",var=" + num(e.spatial_variation) + ") ";
  }
  return {decreasing && bound, d + (bound ? "phi bound ok" : "phi bound violated")};
}

// 7. Ergodic residual under joint refinement of h and dtheta.
Outcome residual_refinement() {
  const std::vector<double> hs{1.0 / 8, 1.0 / 16, 1.0 / 32};
  const VanishingOptions base;
  double finest = 1e300;
  for (double a : base.alphas) finest = std::min(finest, max_monotone_dtheta(canonical_1d(hs.back()).with_alpha(a)));
  std::vector<double> res;
  std::string d;
  for (std::size_t l = 0; l < hs.size(); ++l) {
    VanishingOptions o = base;
    o.solve.dtheta = 0.9 * finest * std::ldexp(1.0, static_cast<int>(hs.size() - 1 - l));
    const ModelSpec m = canonical_1d(hs[l]);
    const RhoEstimate est = vanishing_discount_run(m, o);
    res.push_back(ergodic_residual(m.with_cost_cutoff(est.k_final), est.rho, est.u_hat).interior_max);
    d += "h=" + num(hs[l]) + " dtheta=" + num(o.solve.dtheta) + " res=" + num(res.back()) + " ";
  }
  bool ok = true;
  for (std::size_t l = 1; l < res.size(); ++l) {
    const double ratio = res[l - 1] / res[l];
    ok = ok && ratio >= 1.4;
    d += "ratio=" + num(ratio) + " ";
  }
  return {ok, d};
}

// 8. Hitting probabilities of drifted reflected BM and the recurrence verdicts.
Outcome recurrence() {
  const double h = 1.0 / 32;
  bool ok = true;
  std::string d;
  for (double mu : {0.25, 0.5, 1.0}) {
    const ModelSpec m = rbm(mu, h);
    const Ball target = default_target(m.domain);
    const double b = target.center[0] + target.radius;
    const HittingField f = hitting_probability_pde(m, ControlPolicy::constant({1.0}), target, b + 12.0);
    double worst = 0.0;
    for (double x = b + 0.5; x <= b + 4.0; x += 0.5)
      worst = std::max(worst, std::abs(f.at(Vec{x}) - std::exp(-2.0 * mu * (x - b))));
    ok = ok && worst <= 1e-2;
    d += "mu=" + num(mu) + " err=" + num(worst) + " ";
  }
  for (double mu : {-0.5, 0.0, 0.5}) {
    const ModelSpec m = rbm(mu, h);
    const Ball target = default_target(m.domain);
    const double b = target.center[0] + target.radius;
    std::vector<double> radii;
    for (int j = 0; j < 7; ++j) radii.push_back(b + 12.0 * std::ldexp(1.0, j));
    const RecurrenceReport r = classify_recurrence(m, ControlPolicy::constant({1.0}), target, Vec{b + 1.0}, radii);
    const Verdict want = mu <= 0.0 ? Verdict::recurrent : Verdict::transient;
    ok = ok && r.verdict == want;
    d += "mu=" + num(mu) + " " + to_string(r.verdict) + " ";
  }
  return {ok, d};
}

// 9. Martingale identity on 1-D reflected BM.
Outcome martingale() {
  const ModelSpec m = rbm(0.0, 0.0625);
  MartingaleTestSpec spec;
  spec.functions = test_function_catalog(1, m.domain.box_side);
  spec.start = Vec{0.5};
  const MartingaleReport r =
      martingale_residual(m, ControlPolicy::constant({1.0}), spec, {1e-3, 100000, kSeed, Exec::parallel});
  std::string d = "max_z=" + num(r.max_z);
  for (const FunctionResidual& f : r.functions) d += " " + f.name + "=" + num(f.max_z) + (f.boundary_ok ? "" : "!");
  return {r.pass && r.max_z <= 4.0, d};
}

struct LawObserver {
  double start_xi = 0.0;
  double xi = 0.0;
  double last = 0.0;
  bool confined = true;
  bool complementary = true;
  bool monotone = true;
  void start(const Vec& x) {
    for (double v : x) confined = confined && v >= 0.0;
  }
  bool step(const StepView& v) {
    double lo = v.x_next[0];
    for (double c : v.x_next) {
      confined = confined && c >= 0.0;
      lo = std::min(lo, c);
    }
    monotone = monotone && v.dxi >= 0.0;
    if (v.dxi > 0.0) complementary = complementary && lo == 0.0;
    xi += v.dxi;
    last = v.x_next[0];
    return true;
  }
};

// 10. E X_1 = sqrt(2 / pi) for reflected BM from 0; confinement and
// complementarity on every path.
Outcome simulator_laws() {
  bool invariants = true;
  const std::size_t n = 20000;
  std::vector<double> end(n);
  const ModelSpec m = rbm(0.0, 0.0625);
  for_each_path(n, Exec::parallel, [&](std::size_t i) {
    LawObserver obs;
    run_path(m, ControlPolicy::constant({1.0}), {Vec{0.0}, 1.0, 1e-4, split_seed(kSeed, i)}, obs);
    end[i] = obs.last;
    if (!(obs.confined && obs.complementary && obs.monotone)) {
#pragma omp critical
      invariants = false;
    }
  });
  double mean = 0.0, sq = 0.0;
  for (double v : end) mean += v;
  mean /= n;
  for (double v : end) sq += (v - mean) * (v - mean);
  const double se = std::sqrt(sq / (n - 1) / n);
  const double exact = std::sqrt(2.0 / std::acos(-1.0));

  const std::vector<ModelSpec> others{canonical_1d(0.0625),
                                      model("dim = 2\nbox_side = 6\nstep = 0.25\ndrift = -1 -1; 1 1\n"),
                                      model("dim = 2\nbox_side = 6\nstep = 0.25\ndrift = -1 -1; 1 1\n"
                                            "gamma = constant\ngamma_dir = 1 0.5\n")};
  for (const ModelSpec& o : others) {
    const std::vector<double> w(static_cast<std::size_t>(o.actions.size()), 1.0 / o.actions.size());
    for (const PathBundle& p : simulate_batch(o, ControlPolicy::constant(w), Vec(o.domain.dim, 0.5), 2.0, 1e-2, 500, kSeed)) {
      const PathInvariantReport r = check_path_invariants(p, 0.0);
      invariants = invariants && r.confined && r.xi_monotone && r.complementary;
    }
  }
  const bool ok = std::abs(mean - exact) <= 3.0 * se && invariants;
  return {ok, "mean X_1=" + num(mean) + " exact=" + num(exact) + " se=" + num(se) +
                  (invariants ? " invariants ok" : " invariants violated")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 11. Same config and seed, same bytes.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "rsoc_acceptance_determinism";
  fs::remove_all(root);
  const std::string cfg_text =
      "[model]\nstep = 0.125\n[numerics]\nn_paths = 400\nhorizon = 2\nergodic_horizons = 5, 10, 20\n"
      "ergodic_paths = 200\nalphas = 1, 0.5, 0.25\n[run]\nseed = 77\n";
  bool ok = true;
  std::string d;
  for (Command c : {Command::simulate, Command::solve_discounted, Command::solve_ergodic, Command::probe_recurrence,
                    Command::verify, Command::suite}) {
    std::ostringstream log;
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      dirs.push_back(root / (std::string(to_string(c)) + "_" + tag));
      run(c, parse_config(cfg_text), dirs.back(), log);
    }
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      const std::string name = e.path().filename().string();
      const fs::path other = dirs[1] / name;
      bool same;
      if (name == "manifest.json") {
        auto a = nlohmann::json::parse(slurp(e.path()));
        auto b = nlohmann::json::parse(slurp(other));
        a.erase("wall_seconds");
        b.erase("wall_seconds");
        same = a == b;
      } else {
        same = fs::exists(other) && slurp(e.path()) == slurp(other);
      }
      ++files;
      if (!same) {
        ok = false;
        d += std::string(to_string(c)) + "/" + name + " differs ";
      }
    }
    d += std::string(to_string(c)) + ":" + std::to_string(files) + " files ";
  }
  return {ok, d};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "constant_cost_closed_form", 10, constant_cost},
      {2, "a_priori_bounds", 60, a_priori_bounds},
      {3, "representation", 300, representation},
      {4, "dynamic_programming", 300, dpp},
      {5, "ergodic_sandwich", 1800, ergodic_sandwich},
      {6, "g_constancy", 600, g_constancy},
      {7, "ergodic_residual_refinement", 1800, residual_refinement},
      {8, "recurrence_probe", 600, recurrence},
      {9, "martingale_identity", 600, martingale},
      {10, "simulator_laws", 600, simulator_laws},
      {11, "determinism", 600, determinism},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool pass = true;
  for (const Criterion& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) {
      o.pass = false;
      o.detail += " over budget " + num(c.budget_seconds) + " s";
    }
    pass = pass && o.pass;
    std::printf("criterion %d %s: %s %s [%.1f s]\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return pass ? 0 : 1;
}
