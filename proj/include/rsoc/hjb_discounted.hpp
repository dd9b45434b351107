#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rsoc/domain_model.hpp"
#include "rsoc/hjb_kernels.hpp"
#include "rsoc/policy.hpp"
#include "rsoc/reflected_sde.hpp"
#include "rsoc/value_field.hpp"

namespace rsoc {

struct DiscountedOptions {
  /// Step in ln(theta). 0 picks min(default_dtheta, monotone bound).
  double dtheta = 0.0;
  double default_dtheta = 1e-3;
  /// Slices kept besides the first and the last three steps.
  std::size_t max_slices = 400;
  Exec exec = Exec::parallel;
};

/// Largest ln(theta) step keeping the explicit march monotone:
/// alpha / (sum_i a_ii / h^2 + ||b|| d / h + ||r||). Infinite when the rate is 0.
double max_monotone_dtheta(const ModelSpec& model);

/// Marches alpha theta u_theta = H[u] in tau = ln(theta) from
/// u(kappa, .) = exp(kappa ||r|| / alpha) up to theta = 1.
/// Throws ConfigError when `dtheta` breaks monotonicity (the message gives
/// the bound) and SolverError on a non-positive or non-finite slice.
ValueField solve_discounted(const ModelSpec& model, const DiscountedOptions& opts = {});

/// One-hot argmin selector of the Hamiltonian at theta (lowest index on ties).
Policy extract_policy(const HjbOperator& op, const ValueField& field, double theta);
Policy extract_policy(const ModelSpec& model, const ValueField& field, double theta);

/// Time-dependent optimal control for a path started at theta_start: at time t
/// it applies the selector at theta_start exp(-alpha t), snapped to the nearest
/// stored slice. Below the tabulated range the kappa slice is used.
ControlPolicy optimal_feedback(const ModelSpec& model, const ValueField& field, double theta_start);

struct BoundsReport {
  double upper_slack = 0.0;       // min over nodes of theta ||r|| / alpha + ln(1 + 1e-6) - ln u
  double lower_slack = 0.0;       // min over nodes of ln u + 1e-12
  double derivative_slack = 0.0;  // min over nodes of 1 - |du/dtheta| / bound
  bool theta_monotone = true;     // u nondecreasing in theta at every node
  bool pass = false;
};

/// 1 <= u <= exp(theta ||r|| / alpha) (1 + 1e-6) and
/// |u(theta') - u(theta)| / (theta' - theta) <= 3 exp((theta' + 3) ||r|| / alpha) ||r|| / alpha
/// over consecutive stored slices.
BoundsReport verify_bounds(const ValueField& field);

struct RepresentationReport {
  double theta = 0.0;
  double kappa = 0.0;
  double horizon = 0.0;  // ln(theta / kappa) / alpha
  double log_u_pde = 0.0;
  double log_u_mc = 0.0;
  double mc_std_error = 0.0;  // on the log scale
  double pde_error = 0.0;     // on the log scale, supplied by the caller
  double relative_gap = 0.0;  // |u_mc / u_pde - 1|
  double error_bar = 0.0;     // relative, sqrt(mc^2 + pde^2)
  std::size_t n_paths = 0;
  bool pass = false;
};

/// Compares u(theta, x0) with
/// E[exp(kappa ||r|| / alpha) exp(int_0^T theta e^{-alpha s} r ds)], T = ln(theta / kappa) / alpha,
/// under the optimal feedback. Passes when the gap is within 3 error bars.
RepresentationReport representation_check(const ModelSpec& model, const ValueField& field, std::size_t n_paths,
                                          std::uint64_t base_seed, double dt, double pde_error = 0.0,
                                          Exec exec = Exec::parallel);

}  // namespace rsoc
