#include "rsoc/cost_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsoc/errors.hpp"
#include "rsoc/stats.hpp"

namespace rsoc {
namespace {

void check_mc(const McOptions& mc) {
  if (mc.n_paths < 2) throw ValidationError("n_paths must be >= 2 to form a standard error");
  if (!(mc.dt > 0.0)) throw ValidationError("dt must be > 0");
}

double contaminated(const std::vector<char>& flags) {
  if (flags.empty()) return 0.0;
  const auto k = std::count(flags.begin(), flags.end(), char{1});
  return static_cast<double>(k) / static_cast<double>(flags.size());
}

struct DiscountedSum {
  const CoefficientField& coeffs;
  double theta;
  double alpha;
  double sum = 0.0;
  bool outer = false;
  void start(const Vec&) {}
  bool step(const StepView& v) {
    sum += theta * std::exp(-alpha * v.t) * mix_cost(coeffs, v.x, v.weights) * v.dt;
    outer = outer || v.touched_outer;
    return true;
  }
};

struct LadderSum {
  const CoefficientField& coeffs;
  double theta;
  const std::vector<int>& marks;  // step counts at which to record
  std::vector<double>& out;       // one entry per mark
  double sum = 0.0;
  std::size_t next = 0;
  bool outer = false;
  void start(const Vec&) {}
  bool step(const StepView& v) {
    sum += theta * mix_cost(coeffs, v.x, v.weights) * v.dt;
    outer = outer || v.touched_outer;
    while (next < marks.size() && marks[next] == v.n + 1) out[next++] = sum;
    return true;
  }
};

}  // namespace

CostEstimate estimate_discounted_value(const ModelSpec& model, const ControlPolicy& policy, const Vec& start,
                                       double horizon, const McOptions& mc) {
  check_mc(mc);
  require_in_orthant(start);
  if (horizon < 10.0 / model.alpha * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "horizon " << horizon << " below the tail cutoff 10/alpha = " << 10.0 / model.alpha;
    throw ValidationError(os.str());
  }
  std::vector<double> a(mc.n_paths);
  std::vector<char> outer(mc.n_paths, 0);
  for_each_path(mc.n_paths, mc.exec, [&](std::size_t i) {
    DiscountedSum acc{model.coeffs, model.theta, model.alpha};
    run_path(model, policy, {start, horizon, mc.dt, split_seed(mc.base_seed, i)}, acc);
    a[i] = acc.sum;
    outer[i] = acc.outer ? 1 : 0;
  });
  const stats::MeanSe est = stats::log_mean_exp_batched(a);
  CostEstimate out;
  out.log_mean = est.mean;
  out.std_error = est.std_error;
  out.value = est.mean / model.theta;
  out.value_std_error = est.std_error / model.theta;
  out.n_paths = mc.n_paths;
  out.horizon = horizon;
  out.contaminated_fraction = contaminated(outer);
  out.tail_bound = model.theta * model.coeffs.bounds(model.grid()).cost_sup * std::exp(-model.alpha * horizon) /
                   model.alpha;
  return out;
}

CostEstimate estimate_ergodic_value(const ModelSpec& model, const ControlPolicy& policy, const Vec& start,
                                    const std::vector<double>& horizons, const McOptions& mc) {
  check_mc(mc);
  require_in_orthant(start);
  if (horizons.size() < 3) throw ValidationError("ergodic estimate needs at least 3 horizons");
  std::vector<int> marks;
  for (std::size_t j = 0; j < horizons.size(); ++j) {
    if (!(horizons[j] > 0.0) || (j > 0 && !(horizons[j] > horizons[j - 1])))
      throw ValidationError("horizons must be positive and increasing");
    marks.push_back(step_count(horizons[j], mc.dt));
  }
  const std::size_t nh = horizons.size();
  std::vector<double> a(mc.n_paths * nh);
  std::vector<char> outer(mc.n_paths, 0);
  for_each_path(mc.n_paths, mc.exec, [&](std::size_t i) {
    std::vector<double> row(nh, 0.0);
    LadderSum acc{model.coeffs, model.theta, marks, row};
    run_path(model, policy, {start, horizons.back(), mc.dt, split_seed(mc.base_seed, i)}, acc);
    for (std::size_t j = 0; j < nh; ++j) a[j * mc.n_paths + i] = row[j];
    outer[i] = acc.outer ? 1 : 0;
  });

  CostEstimate out;
  out.n_paths = mc.n_paths;
  out.contaminated_fraction = contaminated(outer);
  for (std::size_t j = 0; j < nh; ++j) {
    const std::span<const double> col(a.data() + j * mc.n_paths, mc.n_paths);
    const stats::MeanSe est = stats::log_mean_exp_batched(col);
    const double t = marks[j] * mc.dt;
    out.per_horizon.push_back({t, est.mean / (model.theta * t), est.std_error / (model.theta * t), est.mean});
  }
  const HorizonValue& last = out.per_horizon.back();
  out.value = last.value;
  out.value_std_error = last.std_error;
  out.log_mean = last.log_mean;
  out.std_error = last.std_error * model.theta * last.horizon;
  out.horizon = last.horizon;
  const double prev = out.per_horizon[nh - 2].value;
  if (std::abs(last.value - prev) > 0.05 * std::abs(last.value)) {
    out.settled = false;
    std::ostringstream os;
    os << "ergodic value not settled: " << prev << " at T = " << out.per_horizon[nh - 2].horizon << " vs "
       << last.value << " at T = " << last.horizon;
    out.warnings.push_back(os.str());
  }
  if (out.contaminated_fraction > 0.0) {
    std::ostringstream os;
    os << out.contaminated_fraction << " of paths touched the outer truncation faces";
    out.warnings.push_back(os.str());
  }
  return out;
}

namespace {

struct DppAccumulator {
  const CoefficientField& coeffs;
  double theta;
  double alpha;
  double exit_side;
  double sum = 0.0;
  double tau = 0.0;
  Vec x_tau;
  void start(const Vec& x) { x_tau = x; }
  bool step(const StepView& v) {
    sum += theta * std::exp(-alpha * v.t) * mix_cost(coeffs, v.x, v.weights) * v.dt;
    tau = v.t + v.dt;
    x_tau = v.x_next;
    for (int i = 0; i < v.x_next.size(); ++i)
      if (v.x_next[i] > exit_side) return false;
    return true;
  }
};

}  // namespace

DppReport dpp_residual(const ModelSpec& model, const ControlPolicy& policy, const ValueField& field,
                       const Vec& start, const StoppingRule& stop, const McOptions& mc) {
  check_mc(mc);
  require_in_orthant(start);
  if (!(stop.t_cap >= 0.0) || !(stop.exit_side > 0.0)) throw ValidationError("invalid stopping rule");
  const double theta = model.theta;
  DppReport rep;
  rep.n_paths = mc.n_paths;
  rep.log_u = field.log_u_at(theta, start);
  bool outside = false;
  for (int i = 0; i < start.size(); ++i) outside = outside || start[i] > stop.exit_side;
  if (stop.t_cap == 0.0 || outside) return rep;

  std::vector<double> a(mc.n_paths);
  std::vector<double> taus(mc.n_paths);
  for_each_path(mc.n_paths, mc.exec, [&](std::size_t i) {
    DppAccumulator acc{model.coeffs, theta, field.alpha, stop.exit_side};
    run_path(model, policy, {start, stop.t_cap, mc.dt, split_seed(mc.base_seed, i)}, acc);
    a[i] = acc.sum + field.log_u_at(theta * std::exp(-field.alpha * acc.tau), acc.x_tau);
    taus[i] = acc.tau;
  });
  const stats::MeanSe est = stats::log_mean_exp_batched(a);
  rep.log_lhs = est.mean;
  rep.residual = std::expm1(est.mean - rep.log_u);
  rep.std_error = est.std_error * (1.0 + rep.residual);
  rep.mean_tau = stats::mean_se(taus).mean;
  return rep;
}

}  // namespace rsoc
