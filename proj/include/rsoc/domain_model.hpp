#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsoc/grid.hpp"
#include "rsoc/vec.hpp"

namespace rsoc {

/// Finite action set S with relaxed controls as probability vectors over S.
class ActionSpace {
 public:
  ActionSpace() = default;
  explicit ActionSpace(std::vector<std::string> labels);

  int size() const noexcept { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Throws ValidationError unless w is a probability vector of length size()
  /// (nonnegative entries summing to 1 within 1e-12).
  void validate_weights(std::span<const double> w) const;
  std::vector<double> vertex(int action) const;

 private:
  std::vector<std::string> labels_;
};

enum class DriftKind { constant, linear };
enum class GammaKind { normal, constant };
enum class CostKind { ramp, constant };

/// Per-action drift. constant: b(x, s) = v_s. linear: b_i(x, s) = v_{s,i} x_i.
struct DriftModel {
  DriftKind kind = DriftKind::constant;
  std::vector<Vec> per_action;
};

/// Running cost r(x, s) = base(x) + action_cost[s], multiplied by the cutoff
/// ramp chi_k(|x|) when `cutoff` is set.
/// base(x) = min(slope |x|, cap) for ramp, `value` for constant.
struct CostModel {
  CostKind kind = CostKind::ramp;
  double slope = 1.0;
  double cap = 2.0;
  double value = 0.0;
  std::vector<double> action_cost;
  std::optional<double> cutoff;
};

/// C^1 cubic ramp: 1 on [0, k], 0 on [k+1, inf), smoothstep in between.
double cutoff_ramp(double radius, double k) noexcept;

struct CoefficientBounds {
  double cost_sup = 0.0;         // ||r||_inf over grid x actions
  double drift_sup = 0.0;        // max |b_i| over grid x actions x axes
  double diffusion_trace = 0.0;  // max sum_i a_ii over grid
  double cross_sup = 0.0;        // max sum_{i<j} |a_ij| over grid
};

/// Catalog-built coefficient fields b, sigma, gamma, r of the controlled
/// reflected diffusion. Immutable.
class CoefficientField {
 public:
  CoefficientField() = default;
  CoefficientField(int dim, DriftModel drift, Mat sigma, GammaKind gamma_kind, Vec gamma_dir,
                   CostModel cost, double ellipticity, double reflection_margin);

  int dim() const noexcept { return dim_; }
  int num_actions() const noexcept { return static_cast<int>(drift_.per_action.size()); }

  Vec drift(const Vec& x, int action) const noexcept;
  const Mat& sigma(const Vec& x) const noexcept;
  /// a = sigma sigma^T
  const Mat& diffusion(const Vec& x) const noexcept;
  /// Reflection direction used on inner face `face` at x. Positive
  /// `face`-component means the push points into the orthant.
  Vec gamma(const Vec& x, int face) const noexcept;
  double cost(const Vec& x, int action) const noexcept;

  double ellipticity() const noexcept { return delta_; }
  double reflection_margin() const noexcept { return eta_; }
  const CostModel& cost_model() const noexcept { return cost_; }
  const DriftModel& drift_model() const noexcept { return drift_; }
  GammaKind gamma_kind() const noexcept { return gamma_kind_; }

  CoefficientBounds bounds(const Grid& grid) const;
  /// r_k = r chi_k.
  CoefficientField with_cost_cutoff(double k) const;

 private:
  int dim_ = 1;
  DriftModel drift_;
  Mat sigma_;
  Mat a_;
  GammaKind gamma_kind_ = GammaKind::normal;
  Vec gamma_dir_;
  CostModel cost_;
  double delta_ = 1.0;
  double eta_ = 0.5;
};

/// Everything needed to pose the control problem on the truncated orthant.
struct ModelSpec {
  OrthantDomain domain;
  ActionSpace actions;
  CoefficientField coeffs;
  double theta = 1.0;
  double alpha = 1.0;
  double kappa = 0.05;
  std::uint64_t seed = 0;
  Vec x0;  // normalization point, snapped to a grid node; also the default start state

  /// Throws ValidationError on any violated invariant (0 < kappa < theta <= 1,
  /// alpha > 0, x0 an interior grid node, coefficient/action counts agree).
  void validate() const;
  Grid grid() const { return Grid(domain); }
  std::size_t x0_index() const;
  ModelSpec with_alpha(double a) const;
  ModelSpec with_cost_cutoff(double k) const;
};

/// Throws DomainError if any coordinate of x is negative.
void require_in_orthant(const Vec& x);

/// b(x, v) = sum_i w_i b(x, s_i)
Vec drift_relaxed(const CoefficientField& coeffs, const ActionSpace& actions, const Vec& x,
                  std::span<const double> weights);
/// r(x, v) = sum_i w_i r(x, s_i)
double cost_relaxed(const CoefficientField& coeffs, const ActionSpace& actions, const Vec& x,
                    std::span<const double> weights);

struct EllipticityReport {
  double min_quadratic_form = 0.0;  // min over samples of the smallest eigenvalue of a
  double min_random_direction = 0.0;
  double delta = 0.0;
  bool pass = false;
};

/// Samples grid nodes (all of them when sample_count >= grid size) and checks
/// x^T a x >= delta |x|^2. Deterministic in `seed`.
EllipticityReport check_ellipticity(const CoefficientField& coeffs, const Grid& grid, int sample_count,
                                    std::uint64_t seed);

struct ReflectionReport {
  double min_gamma_dot_n = 0.0;
  double eta = 0.0;
  std::size_t worst_node = 0;
  int worst_face = -1;
  bool pass = false;
};

/// Minimum of gamma . n over every inner-face boundary node (each face the
/// node lies on), n the inward unit normal of that face.
ReflectionReport check_reflection_angle(const CoefficientField& coeffs, const Grid& grid);

}  // namespace rsoc
