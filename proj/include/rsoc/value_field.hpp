#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rsoc/grid.hpp"

namespace rsoc {

/// u(theta, .) on the grid, stored as w * exp(log_scale) with max(w) = 1 so
/// that exp(theta ||r|| / alpha) never overflows.
struct ValueSlice {
  double theta = 0.0;
  double log_scale = 0.0;
  std::vector<double> w;
};

/// Tabulated solution of the discounted risk-sensitive HJB on a theta grid in
/// [kappa, 1] times the spatial grid.
struct ValueField {
  OrthantDomain domain;
  double alpha = 1.0;
  double kappa = 0.05;
  std::optional<double> cost_cutoff;  // k of r_k, or none
  double cost_sup = 0.0;              // ||r||_inf used for the initial slice
  std::size_t x0_index = 0;
  double dtau = 0.0;  // step in ln(theta)
  long steps = 0;
  std::vector<ValueSlice> slices;  // increasing theta

  Grid grid() const { return Grid(domain); }
  std::size_t size() const noexcept { return slices.size(); }
  double theta_min() const { return slices.front().theta; }
  double theta_max() const { return slices.back().theta; }

  double log_u(std::size_t slice, std::size_t node) const;
  /// ln u(theta, x), multilinear in x and linear in u along theta. Throws
  /// InterpolationError outside [theta_min, theta_max].
  double log_u_at(double theta, const Vec& x) const;
  /// Slice at theta with a common scale: u = w * exp(log_scale).
  ValueSlice slice_at(double theta) const;
  /// Index of the stored slice with theta closest to `theta`.
  std::size_t nearest_slice(double theta) const;
};

}  // namespace rsoc
