#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsoc/cost_functionals.hpp"
#include "rsoc/domain_model.hpp"
#include "rsoc/policy.hpp"
#include "rsoc/stats.hpp"

namespace rsoc {

struct Ball {
  Vec center;
  double radius = 1.0;
  bool contains(const Vec& x) const noexcept { return norm(x - center) <= radius; }
};

/// Radius L/10 around (L/4, ..., L/4).
Ball default_target(const OrthantDomain& domain);

/// P_x(hit B before |X| reaches R) on the grid of spacing h over [0, R']^d
/// (R' = R rounded up to the grid).
struct HittingField {
  double R = 0.0;
  OrthantDomain domain;
  std::vector<double> phi;
  double residual = 0.0;  // max-norm residual of the system scaled to unit diagonal
  double at(const Vec& x) const;
};

/// Solves L phi = 0 off B with phi = 1 on B, phi = 0 for |x| >= R and the
/// oblique relation on the inner faces, under the stationary `policy`.
HittingField hitting_probability_pde(const ModelSpec& model, const ControlPolicy& policy, const Ball& target,
                                     double R);

struct HitReport {
  double fraction = 0.0;
  stats::Interval interval;
  double mean_time = 0.0;  // among hits; 0 when none
  std::size_t hits = 0;
  std::size_t n_paths = 0;
};

/// Fraction of paths from `start` entering B before t_cap. Between grid
/// times a Brownian-bridge test against the tangent plane of B catches
/// crossings the endpoints miss.
HitReport hitting_time_mc(const ModelSpec& model, const ControlPolicy& policy, const Ball& target,
                          const Vec& start, double t_cap, const McOptions& mc);

enum class Verdict { recurrent, transient, inconclusive };
const char* to_string(Verdict v) noexcept;

struct RecurrenceReport {
  Ball target;
  Vec query;
  std::vector<double> radii;
  std::vector<double> phi_at_query;
  double limit_estimate = 0.0;
  bool monotone_in_R = true;  // phi_R' >= phi_R at every common node
  Verdict verdict = Verdict::inconclusive;
  std::optional<HitReport> mc;
};

/// recurrent: phi_R(x) >= 1 - eps at the largest R and the last increment
/// < eps / 4. transient: last increment < eps / 4 and phi_R(x) <= 1 - 10 eps.
RecurrenceReport classify_recurrence(const ModelSpec& model, const ControlPolicy& policy, const Ball& target,
                                     const Vec& query, const std::vector<double>& radii, double eps = 0.01);

}  // namespace rsoc
