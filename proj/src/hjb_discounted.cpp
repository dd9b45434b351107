#include "rsoc/hjb_discounted.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "rsoc/errors.hpp"
#include "rsoc/stats.hpp"

namespace rsoc {

double max_monotone_dtheta(const ModelSpec& model) {
  const HjbOperator op(model);
  const double rate = op.monotone_rate(1.0);
  return rate > 0.0 ? model.alpha / rate : std::numeric_limits<double>::infinity();
}

namespace {

ValueSlice make_slice(double theta, double log_scale, std::span<const double> w) {
  ValueSlice s;
  s.theta = theta;
  s.log_scale = log_scale;
  s.w.assign(w.begin(), w.end());
  return s;
}

}  // namespace

ValueField solve_discounted(const ModelSpec& model, const DiscountedOptions& opts) {
  model.validate();
  const HjbOperator op(model);
  const double rate = op.monotone_rate(1.0);
  const double bound = rate > 0.0 ? model.alpha / rate : std::numeric_limits<double>::infinity();
  double dtau = opts.dtheta;
  if (dtau < 0.0) throw ConfigError("dtheta must be >= 0");
  if (dtau == 0.0) {
    dtau = std::min(opts.default_dtheta, bound);
  } else if (dtau > bound) {
    std::ostringstream os;
    os << "dtheta = " << dtau << " violates the monotonicity condition; require dtheta <= " << bound;
    throw ConfigError(os.str());
  }

  const double span = -std::log(model.kappa);
  const long steps = std::max(1L, static_cast<long>(std::ceil(span / dtau - 1e-9)));
  dtau = span / static_cast<double>(steps);
  const double lambda = dtau / model.alpha;
  const std::size_t stride =
      std::max<std::size_t>(1, (static_cast<std::size_t>(steps) + opts.max_slices - 1) / std::max<std::size_t>(opts.max_slices, 1));

  ValueField field;
  field.domain = model.domain;
  field.alpha = model.alpha;
  field.kappa = model.kappa;
  field.cost_cutoff = model.coeffs.cost_model().cutoff;
  field.cost_sup = op.bounds().cost_sup;
  field.x0_index = model.x0_index();
  field.dtau = dtau;
  field.steps = steps;

  const std::size_t n = op.grid().size();
  std::vector<double> w(n, 1.0), next(n);
  double log_scale = model.kappa * field.cost_sup / model.alpha;
  field.slices.push_back(make_slice(model.kappa, log_scale, w));

  for (long k = 0; k < steps; ++k) {
    const double theta = model.kappa * std::exp(static_cast<double>(k) * dtau);
    const double theta_next = k + 1 == steps ? 1.0 : model.kappa * std::exp(static_cast<double>(k + 1) * dtau);
    op.step(w, next, lambda, (theta_next - theta) / model.alpha, opts.exec);
    op.apply_boundary(next);
    double mx = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (!(next[p] > 0.0) || !std::isfinite(next[p])) {
        std::ostringstream os;
        os << "non-positive slice at theta = " << theta << " (node " << p << ", value " << next[p] << ")";
        throw SolverError(os.str());
      }
      mx = std::max(mx, next[p]);
    }
    if (mx != 1.0) {
      for (double& v : next) v /= mx;
      log_scale += std::log(mx);
    }
    std::swap(w, next);
    const long done = k + 1;
    if (done % static_cast<long>(stride) == 0 || done >= steps - 2)
      field.slices.push_back(make_slice(theta_next, log_scale, w));
  }
  return field;
}

Policy extract_policy(const HjbOperator& op, const ValueField& field, double theta) {
  const ValueSlice s = field.slice_at(theta);
  const std::size_t n = op.grid().size();
  std::vector<int> actions(n);
  for (std::size_t p = 0; p < n; ++p) op.hamiltonian(s.w, p, theta, &actions[p]);
  return Policy::from_actions(field.domain, op.num_actions(), actions, theta);
}

Policy extract_policy(const ModelSpec& model, const ValueField& field, double theta) {
  if (model.coeffs.cost_model().cutoff != field.cost_cutoff)
    throw ValidationError("value field was solved with a different cost truncation");
  return extract_policy(HjbOperator(model), field, theta);
}

ControlPolicy optimal_feedback(const ModelSpec& model, const ValueField& field, double theta_start) {
  const HjbOperator op(model);
  auto tables = std::make_shared<std::vector<Policy>>();
  tables->reserve(field.size());
  for (const ValueSlice& s : field.slices) tables->push_back(extract_policy(op, field, s.theta));
  std::vector<double> thetas;
  for (const ValueSlice& s : field.slices) thetas.push_back(s.theta);
  const double alpha = field.alpha;
  const int na = op.num_actions();
  return ControlPolicy::feedback(na, [tables, thetas, alpha, theta_start](double t, const Vec& x, double,
                                                                          std::span<double> out) {
    const double th = theta_start * std::exp(-alpha * t);
    auto it = std::lower_bound(thetas.begin(), thetas.end(), th);
    std::size_t j = static_cast<std::size_t>(it - thetas.begin());
    if (j == thetas.size()) {
      j = thetas.size() - 1;
    } else if (j > 0 && th - thetas[j - 1] < thetas[j] - th) {
      --j;
    }
    const auto w = (*tables)[j].lookup(x);
    std::copy(w.begin(), w.end(), out.begin());
  });
}

BoundsReport verify_bounds(const ValueField& field) {
  BoundsReport rep;
  const double rn = field.cost_sup / field.alpha;
  rep.upper_slack = std::numeric_limits<double>::infinity();
  rep.lower_slack = std::numeric_limits<double>::infinity();
  rep.derivative_slack = std::numeric_limits<double>::infinity();
  const std::size_t n = field.slices.front().w.size();
  for (std::size_t j = 0; j < field.size(); ++j) {
    const double th = field.slices[j].theta;
    for (std::size_t p = 0; p < n; ++p) {
      const double lu = field.log_u(j, p);
      rep.upper_slack = std::min(rep.upper_slack, th * rn + std::log1p(1e-6) - lu);
      rep.lower_slack = std::min(rep.lower_slack, lu + 1e-12);
    }
    if (j == 0) continue;
    const double th0 = field.slices[j - 1].theta;
    const double dth = th - th0;
    const double log_bound = std::log(3.0) + (th + 3.0) * rn + std::log(rn);
    for (std::size_t p = 0; p < n; ++p) {
      const double l0 = field.log_u(j - 1, p);
      const double l1 = field.log_u(j, p);
      if (l1 < l0 - 1e-12 * std::max(1.0, std::abs(l0))) rep.theta_monotone = false;
      if (rn == 0.0) {
        rep.derivative_slack = std::min(rep.derivative_slack, l1 == l0 ? 1.0 : -1.0);
        continue;
      }
      const double diff = std::abs(std::expm1(l1 - l0));
      const double ratio = diff == 0.0 ? 0.0 : std::exp(l0 + std::log(diff) - std::log(dth) - log_bound);
      rep.derivative_slack = std::min(rep.derivative_slack, 1.0 - ratio);
    }
  }
  if (field.size() < 2) rep.derivative_slack = 1.0;
  rep.pass = rep.upper_slack >= 0.0 && rep.lower_slack >= 0.0 && rep.derivative_slack >= 0.0;
  return rep;
}

namespace {

struct DiscountedAccumulator {
  const CoefficientField& coeffs;
  double theta;
  double alpha;
  double sum = 0.0;
  void start(const Vec&) {}
  bool step(const StepView& v) {
    sum += theta * std::exp(-alpha * v.t) * mix_cost(coeffs, v.x, v.weights) * v.dt;
    return true;
  }
};

}  // namespace

RepresentationReport representation_check(const ModelSpec& model, const ValueField& field, std::size_t n_paths,
                                          std::uint64_t base_seed, double dt, double pde_error, Exec exec) {
  model.validate();
  if (n_paths < 2) throw ValidationError("n_paths must be >= 2");
  RepresentationReport rep;
  rep.theta = model.theta;
  rep.kappa = field.kappa;
  rep.horizon = std::log(model.theta / field.kappa) / field.alpha;
  rep.n_paths = n_paths;
  rep.pde_error = pde_error;
  const Vec start = field.grid().coord(field.x0_index);
  rep.log_u_pde = field.log_u_at(model.theta, start);

  const ControlPolicy control = optimal_feedback(model, field, model.theta);
  const double offset = field.kappa * field.cost_sup / field.alpha;
  std::vector<double> a(n_paths);
  for_each_path(n_paths, exec, [&](std::size_t i) {
    DiscountedAccumulator acc{model.coeffs, model.theta, field.alpha};
    run_path(model, control, {start, rep.horizon, dt, split_seed(base_seed, i)}, acc);
    a[i] = offset + acc.sum;
  });
  const stats::MeanSe est = stats::log_mean_exp_batched(a);
  rep.log_u_mc = est.mean;
  rep.mc_std_error = est.std_error;
  rep.relative_gap = std::abs(std::expm1(rep.log_u_mc - rep.log_u_pde));
  rep.error_bar = std::hypot(rep.mc_std_error, rep.pde_error);
  rep.pass = rep.relative_gap <= 3.0 * rep.error_bar;
  return rep;
}

}  // namespace rsoc
