#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rsoc/domain_model.hpp"
#include "rsoc/policy.hpp"
#include "rsoc/reflected_sde.hpp"
#include "rsoc/value_field.hpp"

namespace rsoc {

struct HorizonValue {
  double horizon = 0.0;
  double value = 0.0;
  double std_error = 0.0;  // of value
  double log_mean = 0.0;
};

/// Monte Carlo estimate of a risk-sensitive functional. `log_mean` is
/// ln E[e^A] and `std_error` its batch-means standard error; `value` is the
/// J-form ((1/theta) log_mean for discounted, log_mean / (theta T) for ergodic)
/// with standard error `value_std_error`.
struct CostEstimate {
  double value = 0.0;
  double value_std_error = 0.0;
  double log_mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double horizon = 0.0;
  double contaminated_fraction = 0.0;
  double tail_bound = 0.0;  // discounted only
  std::vector<HorizonValue> per_horizon;  // ergodic only
  bool settled = true;
  std::vector<std::string> warnings;
};

struct McOptions {
  double dt = 1e-2;
  std::size_t n_paths = 1000;
  std::uint64_t base_seed = 0;
  Exec exec = Exec::parallel;
};

/// (1/theta) ln E[exp(theta int_0^T e^{-alpha t} r dt)] from `start`.
/// Requires T >= 10 / alpha; reports the tail bound theta ||r|| e^{-alpha T} / alpha.
CostEstimate estimate_discounted_value(const ModelSpec& model, const ControlPolicy& policy, const Vec& start,
                                       double horizon, const McOptions& mc);

/// value(T) = ln E[exp(theta int_0^T r dt)] / (theta T) on an increasing
/// ladder of at least 3 horizons, from one simulation to the largest T.
CostEstimate estimate_ergodic_value(const ModelSpec& model, const ControlPolicy& policy, const Vec& start,
                                    const std::vector<double>& horizons, const McOptions& mc);

/// tau = min(first exit from [0, exit_side]^d, t_cap).
struct StoppingRule {
  double exit_side = 1.0;
  double t_cap = 1.0;
};

struct DppReport {
  double log_lhs = 0.0;  // ln E[exp(theta int_0^tau e^{-alpha t} r) u(theta e^{-alpha tau}, X_tau)]
  double log_u = 0.0;    // ln u(theta, x)
  double residual = 0.0;           // R / u(theta, x)
  double std_error = 0.0;          // of R / u
  double mean_tau = 0.0;
  std::size_t n_paths = 0;
};

/// Dynamic programming residual R = E[...] - u(theta, x) of `field` along
/// `policy`, normalized by u(theta, x). Throws InterpolationError when
/// theta e^{-alpha tau} falls below the tabulated range.
DppReport dpp_residual(const ModelSpec& model, const ControlPolicy& policy, const ValueField& field,
                       const Vec& start, const StoppingRule& stop, const McOptions& mc);

}  // namespace rsoc
