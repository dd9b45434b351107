#include "rsoc/recurrence_probe.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsoc/errors.hpp"
#include "rsoc/hjb_kernels.hpp"

namespace rsoc {

Ball default_target(const OrthantDomain& domain) {
  return {Vec(domain.dim, domain.box_side / 4.0), domain.box_side / 10.0};
}

double HittingField::at(const Vec& x) const {
  if (norm(x) >= R) return 0.0;
  return Grid(domain).interpolate(phi, x);
}

HittingField hitting_probability_pde(const ModelSpec& model, const ControlPolicy& policy, const Ball& target,
                                     double R) {
  if (!policy.is_stationary()) throw ValidationError("recurrence probe needs a stationary policy");
  if (!(R > target.radius)) throw ValidationError("R must exceed the target radius");
  for (int i = 0; i < target.center.size(); ++i)
    if (target.center[i] - target.radius <= 0.0) throw ValidationError("target ball must lie inside the orthant");
  if (norm(target.center) + target.radius >= R) throw ValidationError("target ball must lie inside |x| < R");

  const double h = model.domain.step;
  ModelSpec m = model;
  m.domain.box_side = std::max(4.0, std::ceil(R / h - 1e-9)) * h;
  const HjbOperator op(m);
  const Grid& grid = op.grid();
  const std::size_t n = grid.size();
  const int na = op.num_actions();

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<double> scratch(static_cast<std::size_t>(na));
  std::vector<const BoundaryRelation*> relation(n, nullptr);
  for (const BoundaryRelation& rel : op.boundary()) relation[rel.node] = &rel;

  for (std::size_t p = 0; p < n; ++p) {
    const auto row = static_cast<Eigen::Index>(p);
    const Vec x = grid.coord(p);
    if (target.contains(x)) {
      trip.emplace_back(row, row, 1.0);
      rhs[row] = 1.0;
      continue;
    }
    if (norm(x) >= R) {
      trip.emplace_back(row, row, 1.0);
      continue;
    }
    if (relation[p]) {
      trip.emplace_back(row, row, 1.0);
      const InterpStencil& s = relation[p]->source;
      for (int k = 0; k < s.count; ++k)
        trip.emplace_back(row, static_cast<Eigen::Index>(s.node[k]), -s.weight[k]);
      continue;
    }
    const std::span<const double> w = policy.weights(0.0, x, 0.0, scratch);
    const std::size_t first = trip.size();
    double diag = 0.0;
    const DiffusionRow& dr = op.diffusion_row(p);
    for (int k = 0; k < dr.count; ++k) {
      trip.emplace_back(row, static_cast<Eigen::Index>(dr.nb[k]), dr.c[k]);
      diag -= dr.c[k];
    }
    for (int s = 0; s < na; ++s) {
      const double ws = w[static_cast<std::size_t>(s)];
      if (ws == 0.0) continue;
      const DriftRow& br = op.drift_row(p, s);
      for (int k = 0; k < br.count; ++k) {
        trip.emplace_back(row, static_cast<Eigen::Index>(br.nb[k]), ws * br.c[k]);
        diag -= ws * br.c[k];
      }
    }
    // rows scaled to unit diagonal
    for (std::size_t t = first; t < trip.size(); ++t)
      trip[t] = Eigen::Triplet<double>(trip[t].row(), trip[t].col(), trip[t].value() / -diag);
    trip.emplace_back(row, row, -1.0);
  }

  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("hitting-probability system is singular: " + lu.lastErrorMessage());
  const Eigen::VectorXd phi = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SolverError("hitting-probability solve failed");

  HittingField out;
  out.R = R;
  out.domain = m.domain;
  out.residual = (A * phi - rhs).lpNorm<Eigen::Infinity>();
  if (!(out.residual <= 1e-10)) {
    std::ostringstream os;
    os << "hitting-probability residual " << out.residual << " above 1e-10";
    throw SolverError(os.str());
  }
  out.phi.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    double v = phi[static_cast<Eigen::Index>(p)];
    if (v < -1e-9 || v > 1.0 + 1e-9) {
      std::ostringstream os;
      os << "hitting probability " << v << " outside [0, 1] at node " << p;
      throw SolverError(os.str());
    }
    out.phi[p] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

namespace {

struct HitObserver {
  const Ball& target;
  const CoefficientField& coeffs;
  CounterRng rng;
  bool hit = false;
  double time = 0.0;
  void start(const Vec&) {}
  bool step(const StepView& v) {
    const double d1 = norm(v.x_next - target.center) - target.radius;
    if (d1 <= 0.0) {
      hit = true;
      time = v.t + v.dt;
      return false;
    }
    const double d0 = norm(v.x - target.center) - target.radius;
    const Vec nrm = (1.0 / (d0 + target.radius)) * (v.x - target.center);
    const double var = dot(nrm, coeffs.diffusion(v.x) * nrm) * v.dt;
    if (var > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < std::exp(-2.0 * d0 * d1 / var)) {
      hit = true;
      time = v.t + v.dt;
      return false;
    }
    return true;
  }
};

}  // namespace

HitReport hitting_time_mc(const ModelSpec& model, const ControlPolicy& policy, const Ball& target,
                          const Vec& start, double t_cap, const McOptions& mc) {
  if (!(t_cap > 0.0)) throw ValidationError("t_cap must be > 0");
  if (mc.n_paths < 1) throw ValidationError("n_paths must be >= 1");
  require_in_orthant(start);
  HitReport rep;
  rep.n_paths = mc.n_paths;
  if (target.contains(start)) {
    rep.hits = mc.n_paths;
    rep.fraction = 1.0;
    rep.interval = stats::wilson_interval(rep.hits, rep.n_paths);
    return rep;
  }
  std::vector<char> hit(mc.n_paths, 0);
  std::vector<double> when(mc.n_paths, 0.0);
  for_each_path(mc.n_paths, mc.exec, [&](std::size_t i) {
    const std::uint64_t seed = split_seed(mc.base_seed, i);
    HitObserver obs{target, model.coeffs, CounterRng(split_seed(seed, 0x6869747321ULL))};
    run_path(model, policy, {start, t_cap, mc.dt, seed}, obs);
    hit[i] = obs.hit ? 1 : 0;
    when[i] = obs.time;
  });
  double tsum = 0.0;
  for (std::size_t i = 0; i < mc.n_paths; ++i) {
    if (!hit[i]) continue;
    ++rep.hits;
    tsum += when[i];
  }
  rep.fraction = static_cast<double>(rep.hits) / static_cast<double>(rep.n_paths);
  rep.interval = stats::wilson_interval(rep.hits, rep.n_paths);
  rep.mean_time = rep.hits ? tsum / static_cast<double>(rep.hits) : 0.0;
  return rep;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::recurrent:
      return "recurrent";
    case Verdict::transient:
      return "transient";
    case Verdict::inconclusive:
      break;
  }
  return "inconclusive";
}

RecurrenceReport classify_recurrence(const ModelSpec& model, const ControlPolicy& policy, const Ball& target,
                                     const Vec& query, const std::vector<double>& radii, double eps) {
  if (radii.size() < 3) throw ValidationError("classify_recurrence needs at least 3 radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw ValidationError("radii must be increasing");
  require_in_orthant(query);
  RecurrenceReport rep;
  rep.target = target;
  rep.query = query;
  rep.radii = radii;
  std::vector<double> prev;
  for (double R : radii) {
    HittingField f = hitting_probability_pde(model, policy, target, R);
    rep.phi_at_query.push_back(target.contains(query) ? 1.0 : f.at(query));
    if (!prev.empty()) {
      // Grids share the origin and spacing, so the smaller one is a prefix per axis.
      const int n_prev = static_cast<int>(std::lround(std::pow(static_cast<double>(prev.size()), 1.0 / model.domain.dim)));
      const Grid gb(f.domain);
      for (std::size_t q = 0; q < prev.size(); ++q) {
        MultiIndex m{};
        std::size_t rest = q;
        for (int i = 0; i < model.domain.dim; ++i) {
          m[i] = static_cast<int>(rest % static_cast<std::size_t>(n_prev));
          rest /= static_cast<std::size_t>(n_prev);
        }
        if (f.phi[gb.flat_index(m)] < prev[q] - 1e-12) rep.monotone_in_R = false;
      }
    }
    prev = std::move(f.phi);
  }
  const std::size_t last = rep.phi_at_query.size() - 1;
  const double phi = rep.phi_at_query[last];
  const double inc = std::abs(phi - rep.phi_at_query[last - 1]);
  rep.limit_estimate = phi;
  if (phi >= 1.0 - eps && inc < eps / 4.0) {
    rep.verdict = Verdict::recurrent;
  } else if (inc < eps / 4.0 && phi <= 1.0 - 10.0 * eps) {
    rep.verdict = Verdict::transient;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

}  // namespace rsoc
