#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "rsoc/domain_model.hpp"
#include "rsoc/errors.hpp"
#include "rsoc/policy.hpp"
#include "rsoc/rng.hpp"
#include "rsoc/vec.hpp"

namespace rsoc {

enum class Exec { serial, parallel };

/// One face projection inside a Skorokhod step: push `amount` along `gamma`,
/// with gamma evaluated at the face foot-point `foot`.
struct Push {
  Vec foot;
  Vec gamma;
  int face = -1;
  double amount = 0.0;
};

struct SkorokhodResult {
  Vec y;
  double dxi = 0.0;
  bool touched_outer = false;
};

inline constexpr int kSkorokhodMaxIter = 64;

/// Discrete oblique Skorokhod map for one step: y = x + displacement +
/// sum_k gamma(foot_k) * dxi_k with dxi_k >= 0, by repeated projection onto the
/// most violated inner face. Outer faces x_i = box_side reflect normally and do
/// not contribute to xi. `pushes`, when given, is cleared and receives every
/// projection.
SkorokhodResult skorokhod_step(const Vec& x, const Vec& displacement, const CoefficientField& coeffs,
                               double box_side = std::numeric_limits<double>::infinity(),
                               std::vector<Push>* pushes = nullptr, int max_iter = kSkorokhodMaxIter);

/// Relaxed drift / cost without argument validation (hot path).
inline Vec mix_drift(const CoefficientField& coeffs, const Vec& x, std::span<const double> w) noexcept {
  Vec b(coeffs.dim());
  for (std::size_t s = 0; s < w.size(); ++s)
    if (w[s] != 0.0) b += w[s] * coeffs.drift(x, static_cast<int>(s));
  return b;
}

inline double mix_cost(const CoefficientField& coeffs, const Vec& x, std::span<const double> w) noexcept {
  double r = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s)
    if (w[s] != 0.0) r += w[s] * coeffs.cost(x, static_cast<int>(s));
  return r;
}

struct PathRequest {
  Vec start;
  double horizon = 1.0;
  double dt = 1e-2;
  std::uint64_t seed = 0;
};

int step_count(double horizon, double dt);

/// What an observer sees for step n (from t to t + dt).
struct StepView {
  int n = 0;
  double t = 0.0;
  double dt = 0.0;
  const Vec& x;                     // X_t
  double xi = 0.0;                  // xi_t
  std::span<const double> weights;  // control applied on [t, t + dt)
  const Vec& dw;                    // Brownian increment
  const Vec& x_next;                // X_{t+dt}
  double dxi = 0.0;
  std::span<const Push> pushes;
  bool touched_outer = false;
};

/// Euler-Maruyama with per-step Skorokhod projection. The observer gets
/// `start(x0)` and then `step(view)` per step; returning false from `step`
/// stops the path. Bit-identical output for identical inputs.
template <class Observer>
void run_path(const ModelSpec& model, const ControlPolicy& policy, const PathRequest& req, Observer& obs) {
  const CoefficientField& coeffs = model.coeffs;
  const int d = coeffs.dim();
  const int steps = step_count(req.horizon, req.dt);
  const double sqdt = std::sqrt(req.dt);
  const double box = model.domain.box_side;

  CounterRng rng(req.seed);
  std::normal_distribution<double> normal;
  std::vector<double> scratch(static_cast<std::size_t>(policy.num_actions()));
  std::vector<Push> pushes;
  pushes.reserve(4);

  Vec x = req.start;
  double xi = 0.0;
  obs.start(x);
  for (int n = 0; n < steps; ++n) {
    const double t = n * req.dt;
    const std::span<const double> w = policy.weights(t, x, xi, scratch);
    Vec dw(d);
    for (int i = 0; i < d; ++i) dw[i] = sqdt * normal(rng);
    Vec disp = mix_drift(coeffs, x, w) * req.dt + coeffs.sigma(x) * dw;
    for (int i = 0; i < d; ++i) {
      if (!std::isfinite(disp[i])) {
        std::ostringstream os;
        os << "non-finite displacement at step " << n << " (t = " << t << ")";
        throw SimulationError(os.str());
      }
    }
    const SkorokhodResult r = skorokhod_step(x, disp, coeffs, box, &pushes);
    const StepView view{n, t, req.dt, x, xi, w, dw, r.y, r.dxi, pushes, r.touched_outer};
    const bool go_on = obs.step(view);
    x = r.y;
    xi += r.dxi;
    if (!go_on) break;
  }
}

/// Runs fn(i) for i in [0, n). Parallel execution uses OpenMP; the first
/// exception (lowest path index) is rethrown as SimulationError naming the
/// path.
template <class F>
void for_each_path(std::size_t n, Exec exec, F&& fn) {
  std::mutex mu;
  std::size_t bad = n;
  std::string what;
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mu);
      if (i < bad) {
        bad = i;
        what = e.what();
      }
    }
  };
  if (exec == Exec::parallel) {
    const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < nn; ++i) guarded(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  }
  if (bad < n) {
    std::ostringstream os;
    os << "path " << bad << ": " << what;
    throw SimulationError(os.str());
  }
}

/// Full record of one simulated path.
struct PathBundle {
  int dim = 0;
  int num_actions = 0;
  int steps = 0;
  double dt = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> x;        // (steps + 1) * dim
  std::vector<double> xi;       // steps + 1, cumulative local time
  std::vector<double> dw;       // steps * dim
  std::vector<double> control;  // steps * num_actions
  bool touched_outer = false;

  Vec state(int n) const;
  std::span<const double> weights(int n) const;
};

PathBundle simulate_path(const ModelSpec& model, const ControlPolicy& policy, const PathRequest& req);

/// Path i uses seed split_seed(base_seed, i).
std::vector<PathBundle> simulate_batch(const ModelSpec& model, const ControlPolicy& policy, const Vec& start,
                                       double horizon, double dt, std::size_t n_paths,
                                       std::uint64_t base_seed, Exec exec = Exec::parallel);

struct PathInvariantReport {
  bool confined = true;       // every coordinate >= 0 at every step
  bool xi_monotone = true;    // xi nondecreasing, xi_0 = 0
  bool complementary = true;  // dxi > 0 only when the new state has min coordinate <= h_refl
  double complementarity_mass = 0.0;
};

PathInvariantReport check_path_invariants(const PathBundle& path, double h_refl);

}  // namespace rsoc
