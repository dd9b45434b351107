#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rsoc/domain_model.hpp"
#include "rsoc/hjb_discounted.hpp"
#include "rsoc/policy.hpp"
#include "rsoc/value_field.hpp"

namespace rsoc {

/// r_k = r chi_k with the cubic smoothstep cutoff.
CoefficientField truncate_cost(const CoefficientField& coeffs, double k);

/// phi = (1/theta) ln u and g = alpha phi + alpha theta d(phi)/d(theta) on
/// every stored slice. Derivatives use 3-point differences over neighbouring
/// stored slices (one-sided at the ends).
struct PhiG {
  std::vector<double> thetas;
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> g;
  double alpha_phi_sup = 0.0;         // max |alpha phi|
  double alpha_theta_dphi_sup = 0.0;  // max |alpha theta d(phi)/d(theta)|
  double bound = 0.0;                 // 3 ||r_k||
  double bound_slack = 0.0;           // bound - (sum of the two sups)
  bool bound_pass = false;
  const std::vector<double>& g_last() const { return g.back(); }
};

/// Throws ValidationError with fewer than 3 slices.
PhiG compute_phi_g(const ValueField& field);

/// u(theta, .) / u(theta, x0) per slice; the x0 node holds exactly 1.
ValueField normalize_at(const ValueField& field, std::size_t x0_index);

struct RhoEntry {
  double k = 0.0;
  double alpha = 0.0;
  double rho_candidate = 0.0;      // mean of g(1, .) over the probe box
  double spatial_variation = 0.0;  // max - min of g(1, .) over the probe box
  double phi_bound_slack = 0.0;
  bool phi_bound_pass = false;
  double harnack_ratio = 0.0;  // max / min of the normalized value over the probe box
  bool bounds_pass = false;    // verify_bounds on the inner solve
};

struct RhoEstimate {
  std::vector<RhoEntry> table;
  std::vector<double> ks;
  std::vector<double> rho_k;
  double rho = 0.0;
  double theta = 1.0;
  std::vector<double> u_hat;  // normalized slice at theta, smallest alpha, largest k
  std::size_t x0_index = 0;
  OrthantDomain domain;
  double k_final = 0.0;
  std::vector<Policy> policies;  // one per k; the last is the selector for (rho, u_hat)
  bool variation_decreasing = true;
  std::vector<std::string> warnings;
  const Policy& policy() const { return policies.back(); }
};

struct VanishingOptions {
  std::vector<double> alphas{1.0, 0.5, 0.25, 0.125, 0.0625};
  std::vector<double> ks{4.0, 6.0};
  DiscountedOptions solve;
};

/// Vanishing-discount pipeline: for every (k, alpha) solve with r_k, form g,
/// read rho_k off the smallest alpha, and take rho at the largest k.
RhoEstimate vanishing_discount_run(const ModelSpec& model, const VanishingOptions& opts);

struct ErgodicResidual {
  double interior_max = 0.0;  // over the probe box
  std::size_t worst_node = 0;
  double boundary_max = 0.0;  // discrete oblique derivative
  double policy_interior_max = 0.0;  // same with the given policy instead of the minimum
  std::vector<double> interior;  // per node, 0 off the interior
};

/// theta rho u - min_s[...] - 1/2 tr(a D^2 u) at interior nodes and the
/// boundary relation defect, with the discounted solver's stencils. `model`
/// must carry the cost the pair was computed with.
ErgodicResidual ergodic_residual(const ModelSpec& model, double rho, std::span<const double> u_hat,
                                 const Policy* policy = nullptr);

struct NearMonotoneReport {
  double shell_min = 0.0;  // min over actions and nodes with |x| >= 0.8 L
  double rho = 0.0;
  bool pass = false;
  std::string label;
};

NearMonotoneReport check_near_monotone(const CoefficientField& coeffs, double rho, const OrthantDomain& domain);

}  // namespace rsoc
