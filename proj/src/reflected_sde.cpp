#include "rsoc/reflected_sde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rsoc {

SkorokhodResult skorokhod_step(const Vec& x, const Vec& displacement, const CoefficientField& coeffs,
                               double box_side, std::vector<Push>* pushes, int max_iter) {
  require_in_orthant(x);
  const int d = x.size();
  if (pushes) pushes->clear();

  SkorokhodResult r;
  r.y = x + displacement;
  int iter = 0;
  for (;;) {
    int face = -1;
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
      if (r.y[i] < worst) {
        worst = r.y[i];
        face = i;
      }
    }
    if (face < 0) break;
    if (iter++ >= max_iter) {
      std::ostringstream os;
      os.precision(17);
      os << "Skorokhod projection did not converge after " << max_iter << " iterations; x = (";
      for (int i = 0; i < d; ++i) os << (i ? ", " : "") << x[i];
      os << "), displacement = (";
      for (int i = 0; i < d; ++i) os << (i ? ", " : "") << displacement[i];
      os << ")";
      throw SimulationError(os.str());
    }
    Vec foot = r.y;
    foot[face] = 0.0;
    for (int i = 0; i < d; ++i) foot[i] = std::max(foot[i], 0.0);
    const Vec g = coeffs.gamma(foot, face);
    if (!(g[face] > 0.0)) {
      std::ostringstream os;
      os << "reflection direction has no inward component on face " << face;
      throw SimulationError(os.str());
    }
    const double amount = -r.y[face] / g[face];
    r.y += g * amount;
    r.y[face] = 0.0;
    r.dxi += amount;
    if (pushes) pushes->push_back(Push{foot, g, face, amount});
  }
  for (int i = 0; i < d; ++i) {
    if (r.y[i] > box_side) {
      r.y[i] = box_side;
      r.touched_outer = true;
    }
  }
  return r;
}

int step_count(double horizon, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (!(horizon >= dt * (1.0 - 1e-12))) throw ValidationError("horizon must be >= dt");
  return static_cast<int>(std::ceil(horizon / dt - 1e-9));
}

Vec PathBundle::state(int n) const {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = x[static_cast<std::size_t>(n) * dim + i];
  return v;
}

std::span<const double> PathBundle::weights(int n) const {
  return {control.data() + static_cast<std::size_t>(n) * num_actions, static_cast<std::size_t>(num_actions)};
}

namespace {

struct Recorder {
  PathBundle* out;
  void start(const Vec& x0) {
    out->x.insert(out->x.end(), x0.begin(), x0.end());
    out->xi.push_back(0.0);
  }
  bool step(const StepView& v) {
    out->x.insert(out->x.end(), v.x_next.begin(), v.x_next.end());
    out->xi.push_back(v.xi + v.dxi);
    out->dw.insert(out->dw.end(), v.dw.begin(), v.dw.end());
    out->control.insert(out->control.end(), v.weights.begin(), v.weights.end());
    out->touched_outer = out->touched_outer || v.touched_outer;
    ++out->steps;
    return true;
  }
};

}  // namespace

PathBundle simulate_path(const ModelSpec& model, const ControlPolicy& policy, const PathRequest& req) {
  if (policy.num_actions() != model.actions.size())
    throw ValidationError("policy action count does not match the model");
  require_in_orthant(req.start);
  for (int i = 0; i < req.start.size(); ++i)
    if (req.start[i] > model.domain.box_side) throw DomainError("start point outside the truncation box");
  PathBundle b;
  b.dim = model.domain.dim;
  b.num_actions = model.actions.size();
  b.dt = req.dt;
  b.horizon = req.horizon;
  b.seed = req.seed;
  const int n = step_count(req.horizon, req.dt);
  b.x.reserve(static_cast<std::size_t>(n + 1) * b.dim);
  b.xi.reserve(static_cast<std::size_t>(n + 1));
  b.dw.reserve(static_cast<std::size_t>(n) * b.dim);
  b.control.reserve(static_cast<std::size_t>(n) * b.num_actions);
  Recorder rec{&b};
  run_path(model, policy, req, rec);
  return b;
}

std::vector<PathBundle> simulate_batch(const ModelSpec& model, const ControlPolicy& policy, const Vec& start,
                                       double horizon, double dt, std::size_t n_paths,
                                       std::uint64_t base_seed, Exec exec) {
  if (n_paths < 1) throw ValidationError("n_paths must be >= 1");
  std::vector<PathBundle> out(n_paths);
  for_each_path(n_paths, exec, [&](std::size_t i) {
    out[i] = simulate_path(model, policy, PathRequest{start, horizon, dt, split_seed(base_seed, i)});
  });
  return out;
}

PathInvariantReport check_path_invariants(const PathBundle& path, double h_refl) {
  PathInvariantReport rep;
  const int d = path.dim;
  for (int n = 0; n <= path.steps; ++n)
    for (int i = 0; i < d; ++i)
      if (!(path.x[static_cast<std::size_t>(n) * d + i] >= 0.0)) rep.confined = false;
  if (path.xi.empty() || path.xi[0] != 0.0) rep.xi_monotone = false;
  for (int n = 0; n < path.steps; ++n) {
    const double dxi = path.xi[n + 1] - path.xi[n];
    if (dxi < 0.0) rep.xi_monotone = false;
    if (dxi > 0.0) {
      double m = path.x[static_cast<std::size_t>(n + 1) * d];
      for (int i = 1; i < d; ++i) m = std::min(m, path.x[static_cast<std::size_t>(n + 1) * d + i]);
      if (m > h_refl) rep.complementarity_mass += dxi;
    }
  }
  rep.complementary = rep.complementarity_mass == 0.0;
  return rep;
}

}  // namespace rsoc
