#include "rsoc/domain_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "rsoc/errors.hpp"
#include "rsoc/rng.hpp"

namespace rsoc {

ActionSpace::ActionSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("action set must contain at least one action");
}

void ActionSpace::validate_weights(std::span<const double> w) const {
  if (static_cast<int>(w.size()) != size()) {
    std::ostringstream os;
    os << "relaxed control has " << w.size() << " weights, action set has " << size();
    throw ValidationError(os.str());
  }
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw ValidationError("relaxed control weights must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "relaxed control weights sum to " << sum << ", expected 1";
    throw ValidationError(os.str());
  }
}

std::vector<double> ActionSpace::vertex(int action) const {
  std::vector<double> w(static_cast<std::size_t>(size()), 0.0);
  w.at(static_cast<std::size_t>(action)) = 1.0;
  return w;
}

double cutoff_ramp(double radius, double k) noexcept {
  if (radius <= k) return 1.0;
  if (radius >= k + 1.0) return 0.0;
  const double s = radius - k;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

CoefficientField::CoefficientField(int dim, DriftModel drift, Mat sigma, GammaKind gamma_kind,
                                   Vec gamma_dir, CostModel cost, double ellipticity,
                                   double reflection_margin)
    : dim_(dim),
      drift_(std::move(drift)),
      sigma_(sigma),
      a_(sigma.outer_self()),
      gamma_kind_(gamma_kind),
      gamma_dir_(gamma_dir),
      cost_(std::move(cost)),
      delta_(ellipticity),
      eta_(reflection_margin) {
  if (drift_.per_action.empty()) throw ValidationError("drift needs at least one action");
  for (const Vec& v : drift_.per_action)
    if (v.size() != dim_) throw ValidationError("drift vector dimension does not match dim");
  if (sigma_.size() != dim_) throw ValidationError("sigma dimension does not match dim");
  if (gamma_kind_ == GammaKind::constant) {
    if (gamma_dir_.size() != dim_) throw ValidationError("gamma vector dimension does not match dim");
    const double nrm = norm(gamma_dir_);
    if (!(nrm > 0.0)) throw ValidationError("gamma vector must be nonzero");
    gamma_dir_ *= 1.0 / nrm;
  }
  if (!cost_.action_cost.empty() && static_cast<int>(cost_.action_cost.size()) != num_actions())
    throw ValidationError("action_cost must list one value per action");
  for (double c : cost_.action_cost)
    if (c < 0.0) throw ValidationError("action_cost must be nonnegative");
  if (cost_.kind == CostKind::ramp && (cost_.slope < 0.0 || cost_.cap < 0.0))
    throw ValidationError("ramp cost needs slope >= 0 and cap >= 0");
  if (cost_.kind == CostKind::constant && cost_.value < 0.0)
    throw ValidationError("constant cost must be >= 0");
  if (!(delta_ > 0.0)) throw ValidationError("ellipticity constant delta must be > 0");
  if (!(eta_ > 0.0)) throw ValidationError("reflection margin eta must be > 0");
}

Vec CoefficientField::drift(const Vec& x, int action) const noexcept {
  const Vec& v = drift_.per_action[static_cast<std::size_t>(action)];
  if (drift_.kind == DriftKind::constant) return v;
  Vec b(dim_);
  for (int i = 0; i < dim_; ++i) b[i] = v[i] * x[i];
  return b;
}

const Mat& CoefficientField::sigma(const Vec&) const noexcept { return sigma_; }

const Mat& CoefficientField::diffusion(const Vec&) const noexcept { return a_; }

Vec CoefficientField::gamma(const Vec&, int face) const noexcept {
  if (gamma_kind_ == GammaKind::constant) return gamma_dir_;
  Vec g(dim_);
  g[face] = 1.0;
  return g;
}

double CoefficientField::cost(const Vec& x, int action) const noexcept {
  const double radius = norm(x);
  double r = cost_.kind == CostKind::ramp ? std::min(cost_.slope * radius, cost_.cap) : cost_.value;
  if (!cost_.action_cost.empty()) r += cost_.action_cost[static_cast<std::size_t>(action)];
  if (cost_.cutoff) r *= cutoff_ramp(radius, *cost_.cutoff);
  return r;
}

CoefficientBounds CoefficientField::bounds(const Grid& grid) const {
  CoefficientBounds b;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec x = grid.coord(p);
    for (int s = 0; s < num_actions(); ++s) {
      b.cost_sup = std::max(b.cost_sup, cost(x, s));
      const Vec v = drift(x, s);
      for (int i = 0; i < dim_; ++i) b.drift_sup = std::max(b.drift_sup, std::abs(v[i]));
    }
    const Mat& a = diffusion(x);
    double tr = 0.0;
    double cross = 0.0;
    for (int i = 0; i < dim_; ++i) {
      tr += a(i, i);
      for (int j = i + 1; j < dim_; ++j) cross += std::abs(a(i, j));
    }
    b.diffusion_trace = std::max(b.diffusion_trace, tr);
    b.cross_sup = std::max(b.cross_sup, cross);
  }
  return b;
}

CoefficientField CoefficientField::with_cost_cutoff(double k) const {
  CoefficientField out = *this;
  out.cost_.cutoff = k;
  return out;
}

void ModelSpec::validate() const {
  domain.validate();
  if (coeffs.dim() != domain.dim) throw ValidationError("coefficient dimension does not match dim");
  if (coeffs.num_actions() != actions.size())
    throw ValidationError("number of drift entries does not match number of actions");
  if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
  if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("theta must be in (0, 1]");
  if (!(kappa > 0.0 && kappa < theta)) throw ValidationError("kappa < theta violated (need 0 < kappa < theta)");
  if (x0.size() != domain.dim) throw ValidationError("x0 dimension does not match dim");
  const Grid g(domain);
  const std::size_t idx = g.nearest(x0);
  if (!g.is_interior(idx)) throw ValidationError("x0 must be an interior grid node");
  const Vec snapped = g.coord(idx);
  for (int i = 0; i < domain.dim; ++i)
    if (std::abs(snapped[i] - x0[i]) > 1e-9 * domain.box_side)
      throw ValidationError("x0 must coincide with a grid node");
}

std::size_t ModelSpec::x0_index() const { return Grid(domain).nearest(x0); }

ModelSpec ModelSpec::with_alpha(double a) const {
  ModelSpec m = *this;
  m.alpha = a;
  return m;
}

ModelSpec ModelSpec::with_cost_cutoff(double k) const {
  ModelSpec m = *this;
  m.coeffs = coeffs.with_cost_cutoff(k);
  return m;
}

void require_in_orthant(const Vec& x) {
  for (int i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0)) {
      std::ostringstream os;
      os << "point outside the closed orthant: coordinate " << i << " = " << x[i];
      throw DomainError(os.str());
    }
  }
}

Vec drift_relaxed(const CoefficientField& coeffs, const ActionSpace& actions, const Vec& x,
                  std::span<const double> weights) {
  require_in_orthant(x);
  actions.validate_weights(weights);
  Vec b(coeffs.dim());
  for (int s = 0; s < actions.size(); ++s) {
    if (weights[s] == 0.0) continue;
    b += weights[s] * coeffs.drift(x, s);
  }
  return b;
}

double cost_relaxed(const CoefficientField& coeffs, const ActionSpace& actions, const Vec& x,
                    std::span<const double> weights) {
  require_in_orthant(x);
  actions.validate_weights(weights);
  double r = 0.0;
  for (int s = 0; s < actions.size(); ++s) {
    if (weights[s] == 0.0) continue;
    r += weights[s] * coeffs.cost(x, s);
  }
  return r;
}

EllipticityReport check_ellipticity(const CoefficientField& coeffs, const Grid& grid, int sample_count,
                                    std::uint64_t seed) {
  if (sample_count < 1) throw ValidationError("sample_count must be >= 1");
  const int d = grid.dim();
  CounterRng rng(split_seed(seed, 0xE11));
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  const bool all = static_cast<std::size_t>(sample_count) >= grid.size();
  const std::size_t n = all ? grid.size() : static_cast<std::size_t>(sample_count);

  EllipticityReport rep;
  rep.delta = coeffs.ellipticity();
  rep.min_quadratic_form = std::numeric_limits<double>::infinity();
  rep.min_random_direction = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = all ? k : pick(rng);
    const Mat& a = coeffs.diffusion(grid.coord(p));
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = 0.5 * (a(i, j) + a(j, i));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    rep.min_quadratic_form = std::min(rep.min_quadratic_form, es.eigenvalues()(0));

    Vec u(d);
    for (int i = 0; i < d; ++i) u[i] = normal(rng);
    const double nu = norm(u);
    if (nu > 0.0) {
      u *= 1.0 / nu;
      rep.min_random_direction = std::min(rep.min_random_direction, dot(u, a * u));
    }
  }
  rep.pass = rep.min_quadratic_form >= rep.delta * (1.0 - 1e-9);
  return rep;
}

ReflectionReport check_reflection_angle(const CoefficientField& coeffs, const Grid& grid) {
  ReflectionReport rep;
  rep.eta = coeffs.reflection_margin();
  rep.min_gamma_dot_n = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec x = grid.coord(p);
    for (int i = 0; i < grid.dim(); ++i) {
      if (!grid.on_inner_face(p, i)) continue;
      any = true;
      const double gn = coeffs.gamma(x, i)[i];
      if (gn < rep.min_gamma_dot_n) {
        rep.min_gamma_dot_n = gn;
        rep.worst_node = p;
        rep.worst_face = i;
      }
    }
  }
  if (!any) throw ValidationError("boundary node set is empty");
  rep.pass = rep.min_gamma_dot_n >= rep.eta;
  return rep;
}

}  // namespace rsoc
