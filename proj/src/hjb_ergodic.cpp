#include "rsoc/hjb_ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rsoc/errors.hpp"
#include "rsoc/hjb_kernels.hpp"

namespace rsoc {

CoefficientField truncate_cost(const CoefficientField& coeffs, double k) {
  if (!(k > 0.0)) throw ValidationError("cost truncation level k must be > 0");
  return coeffs.with_cost_cutoff(k);
}

namespace {

// Derivative at x[i] from the 3-point Lagrange stencil on (x[a], x[a+1], x[a+2]).
double lagrange_derivative(const double* x, const double* f, int at) {
  const double x0 = x[0], x1 = x[1], x2 = x[2];
  const double t = x[at];
  const double l0 = ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2));
  const double l1 = ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2));
  const double l2 = ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1));
  return l0 * f[0] + l1 * f[1] + l2 * f[2];
}

}  // namespace

PhiG compute_phi_g(const ValueField& field) {
  const std::size_t m = field.size();
  if (m < 3) throw ValidationError("compute_phi_g needs at least 3 theta slices");
  const std::size_t n = field.slices.front().w.size();
  const double alpha = field.alpha;
  PhiG out;
  out.phi.assign(m, std::vector<double>(n));
  out.g.assign(m, std::vector<double>(n));
  for (std::size_t j = 0; j < m; ++j) out.thetas.push_back(field.slices[j].theta);

  std::vector<double> lu(m);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t j = 0; j < m; ++j) lu[j] = field.log_u(j, p);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t a = j == 0 ? 0 : (j + 1 == m ? m - 3 : j - 1);
      const int at = static_cast<int>(j - a);
      const double th = out.thetas[j];
      const double dlu = lagrange_derivative(&out.thetas[a], &lu[a], at);
      const double phi = lu[j] / th;
      const double g = alpha * dlu;
      out.phi[j][p] = phi;
      out.g[j][p] = g;
      out.alpha_phi_sup = std::max(out.alpha_phi_sup, std::abs(alpha * phi));
      out.alpha_theta_dphi_sup = std::max(out.alpha_theta_dphi_sup, std::abs(g - alpha * phi));
    }
  }
  out.bound = 3.0 * field.cost_sup;
  out.bound_slack = out.bound - (out.alpha_phi_sup + out.alpha_theta_dphi_sup);
  out.bound_pass = out.alpha_phi_sup + out.alpha_theta_dphi_sup <= out.bound * (1.0 + 1e-6);
  return out;
}

ValueField normalize_at(const ValueField& field, std::size_t x0_index) {
  ValueField out = field;
  for (ValueSlice& s : out.slices) {
    const double w0 = s.w[x0_index];
    if (!(w0 > 0.0)) throw SolverError("cannot normalize: u(theta, x0) is not positive");
    for (double& v : s.w) v /= w0;
    s.log_scale = 0.0;
  }
  out.x0_index = x0_index;
  return out;
}

RhoEstimate vanishing_discount_run(const ModelSpec& model, const VanishingOptions& opts) {
  model.validate();
  if (opts.alphas.empty() || opts.ks.empty()) throw ValidationError("alpha and k schedules must be nonempty");
  for (std::size_t i = 0; i < opts.alphas.size(); ++i) {
    if (!(opts.alphas[i] > 0.0) || (i > 0 && !(opts.alphas[i] < opts.alphas[i - 1])))
      throw ValidationError("alpha schedule must be positive and decreasing");
  }
  for (std::size_t i = 0; i < opts.ks.size(); ++i) {
    if (!(opts.ks[i] > 0.0) || (i > 0 && !(opts.ks[i] > opts.ks[i - 1])))
      throw ValidationError("k schedule must be positive and increasing");
  }
  const Grid grid = model.grid();
  const std::vector<std::size_t> probe = grid.probe_box();
  if (probe.empty()) throw ValidationError("probe box contains no grid nodes");

  RhoEstimate est;
  est.domain = model.domain;
  est.x0_index = model.x0_index();
  est.theta = model.theta;
  if (opts.ks.back() + 1.0 > grid.box_side() * std::sqrt(static_cast<double>(grid.dim()))) {
    std::ostringstream os;
    os << "largest k = " << opts.ks.back() << " leaves no zero-cost region inside the box";
    est.warnings.push_back(os.str());
  }

  for (double k : opts.ks) {
    const ModelSpec mk = model.with_cost_cutoff(k);
    double prev_variation = std::numeric_limits<double>::infinity();
    for (double alpha : opts.alphas) {
      const ModelSpec ma = mk.with_alpha(alpha);
      ValueField field;
      try {
        field = solve_discounted(ma, opts.solve);
      } catch (const Error& e) {
        std::ostringstream os;
        os << "k = " << k << ", alpha = " << alpha << ": " << e.what();
        if (e.exit_code() == 1) throw ConfigError(os.str());
        throw SolverError(os.str());
      }
      const PhiG pg = compute_phi_g(field);
      const std::size_t j = field.nearest_slice(model.theta);
      const std::vector<double>& g = pg.g[j];
      double sum = 0.0, gmin = std::numeric_limits<double>::infinity(), gmax = -gmin;
      for (std::size_t p : probe) {
        sum += g[p];
        gmin = std::min(gmin, g[p]);
        gmax = std::max(gmax, g[p]);
      }
      const ValueField nf = normalize_at(field, est.x0_index);
      double umin = std::numeric_limits<double>::infinity(), umax = 0.0;
      for (std::size_t p : probe) {
        umin = std::min(umin, nf.slices[j].w[p]);
        umax = std::max(umax, nf.slices[j].w[p]);
      }
      RhoEntry e;
      e.k = k;
      e.alpha = alpha;
      e.rho_candidate = sum / static_cast<double>(probe.size());
      e.spatial_variation = gmax - gmin;
      e.phi_bound_slack = pg.bound_slack;
      e.phi_bound_pass = pg.bound_pass;
      e.harnack_ratio = umax / umin;
      e.bounds_pass = verify_bounds(field).pass;
      est.table.push_back(e);
      if (!(e.spatial_variation < prev_variation)) {
        est.variation_decreasing = false;
        std::ostringstream os;
        os << "spatial variation of g did not shrink at k = " << k << ", alpha = " << alpha;
        est.warnings.push_back(os.str());
      }
      prev_variation = e.spatial_variation;
      if (alpha == opts.alphas.back()) {
        est.ks.push_back(k);
        est.rho_k.push_back(e.rho_candidate);
        est.u_hat = nf.slices[j].w;
        est.k_final = k;
        est.policies.push_back(extract_policy(HjbOperator(ma), field, model.theta));
      }
    }
  }
  est.rho = est.rho_k.back();
  return est;
}

ErgodicResidual ergodic_residual(const ModelSpec& model, double rho, std::span<const double> u_hat,
                                 const Policy* policy) {
  const HjbOperator op(model);
  const Grid& grid = op.grid();
  if (u_hat.size() != grid.size()) throw ValidationError("u_hat does not match the grid");
  const double theta = model.theta;
  ErgodicResidual rep;
  rep.interior.assign(grid.size(), 0.0);
  for (std::size_t p : op.interior()) rep.interior[p] = theta * rho * u_hat[p] - op.hamiltonian(u_hat, p, theta);
  for (std::size_t p : grid.probe_box()) {
    const double r = std::abs(rep.interior[p]);
    if (r > rep.interior_max) {
      rep.interior_max = r;
      rep.worst_node = p;
    }
    if (policy) {
      const double rp = theta * rho * u_hat[p] - op.relaxed(u_hat, p, policy->at(p), theta);
      rep.policy_interior_max = std::max(rep.policy_interior_max, std::abs(rp));
    }
  }
  rep.boundary_max = op.boundary_residual(u_hat);
  return rep;
}

NearMonotoneReport check_near_monotone(const CoefficientField& coeffs, double rho, const OrthantDomain& domain) {
  const Grid grid(domain);
  const double L = domain.box_side;
  NearMonotoneReport rep;
  rep.rho = rho;
  rep.shell_min = std::numeric_limits<double>::infinity();
  double inner_max = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec x = grid.coord(p);
    double rmin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < coeffs.num_actions(); ++s) rmin = std::min(rmin, coeffs.cost(x, s));
    if (norm(x) >= 0.8 * L) {
      rep.shell_min = std::min(rep.shell_min, rmin);
    } else {
      inner_max = std::max(inner_max, rmin);
    }
  }
  rep.pass = rep.shell_min > rho;
  const CostModel& cm = coeffs.cost_model();
  bool action_free = true;
  for (double c : cm.action_cost) action_free = action_free && c == cm.action_cost.front();
  if (cm.kind == CostKind::ramp && cm.slope > 0.0 && cm.slope * 0.8 * L < cm.cap && !cm.cutoff) {
    rep.label = "cost still growing on the shell";
  } else if (action_free && inner_max <= rep.shell_min) {
    rep.label = "action-independent cost below its limit";
  } else {
    rep.label = "none";
  }
  return rep;
}

}  // namespace rsoc
