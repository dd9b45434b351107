#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rsoc/domain_model.hpp"
#include "rsoc/grid.hpp"
#include "rsoc/reflected_sde.hpp"

namespace rsoc {

/// Positive-coefficient stencil of 1/2 tr(a D^2 u) at an interior node, in
/// difference form sum_k c_k (u[nb_k] - u[p]).
struct DiffusionRow {
  static constexpr int kCap = 2 * kMaxDim + 2 * kMaxDim * (kMaxDim - 1) / 2 * 2;
  std::array<std::uint32_t, kCap> nb{};
  std::array<double, kCap> c{};
  int count = 0;
};

/// Upwind stencil of b(x, s) . grad u plus the running cost r(x, s).
struct DriftRow {
  std::array<std::uint32_t, kMaxDim> nb{};
  std::array<double, kMaxDim> c{};
  int count = 0;
  double cost = 0.0;
};

/// Boundary node value as a convex combination of other nodes:
/// u[node] = sum_k weight_k u[source_k].
struct BoundaryRelation {
  std::uint32_t node = 0;
  int faces = 0;  // number of faces (inner and outer) the node lies on
  InterpStencil source;
};

/// Precomputed monotone discretization of the risk-sensitive Hamiltonian
///   min_s [b(x, s) . grad u + theta r(x, s) u] + 1/2 tr(a(x) D^2 u)
/// with the oblique relation on inner faces and one-sided Neumann on outer
/// faces.
class HjbOperator {
 public:
  /// Throws ConfigError when a is not diagonally dominant somewhere on the
  /// grid, SolverError when a boundary relation cannot be formed.
  explicit HjbOperator(const ModelSpec& model);

  const Grid& grid() const noexcept { return grid_; }
  int num_actions() const noexcept { return num_actions_; }
  const std::vector<std::uint32_t>& interior() const noexcept { return interior_; }
  const std::vector<BoundaryRelation>& boundary() const noexcept { return boundary_; }
  const DiffusionRow& diffusion_row(std::size_t p) const noexcept { return diffusion_[p]; }
  const DriftRow& drift_row(std::size_t p, int s) const noexcept {
    return drift_[p * static_cast<std::size_t>(num_actions_) + static_cast<std::size_t>(s)];
  }
  const CoefficientBounds& bounds() const noexcept { return bounds_; }

  /// Spectral-radius bound used by the monotonicity condition:
  /// sum_i a_ii / h^2 + ||b|| d / h + theta ||r||.
  double monotone_rate(double theta) const noexcept;

  double diffusion(std::span<const double> u, std::size_t p) const noexcept;
  double drift_cost(std::span<const double> u, std::size_t p, int s, double theta) const noexcept;
  /// Minimized Hamiltonian at p; the minimizing action (lowest index on ties)
  /// goes to *arg. Boundary nodes get no diffusion term.
  double hamiltonian(std::span<const double> u, std::size_t p, double theta, int* arg = nullptr) const noexcept;
  /// Generator plus theta r for a fixed relaxed action.
  double relaxed(std::span<const double> u, std::size_t p, std::span<const double> w,
                 double theta) const noexcept;

  /// One march step at interior nodes (out = w elsewhere):
  ///   out = min_s exp(r_s * cost_scale) * (w + lambda * (diffusion + drift_s))
  /// i.e. explicit Euler for the transport part with the cost growth over the
  /// step integrated exactly. Monotone when lambda * monotone_rate(0) <= 1.
  void step(std::span<const double> w, std::span<double> out, double lambda, double cost_scale, Exec exec) const;
  /// Enforces the boundary relations in place. Returns the number of passes.
  int apply_boundary(std::span<double> u) const;
  /// max over boundary nodes of |u[node] - sum_k weight_k u[source_k]| / h.
  double boundary_residual(std::span<const double> u) const noexcept;

 private:
  Grid grid_;
  int num_actions_ = 0;
  CoefficientBounds bounds_;
  std::vector<std::uint32_t> interior_;
  std::vector<DiffusionRow> diffusion_;  // per node; empty rows off the interior
  std::vector<DriftRow> drift_;          // per node x action
  std::vector<BoundaryRelation> boundary_;
};

namespace reference {

/// Serial evaluation straight from the coefficient field, no precomputed
/// stencils. Used to test HjbOperator.
void hjb_step(const ModelSpec& model, std::span<const double> w, std::span<double> out, double lambda,
              double cost_scale);
void apply_boundary(const ModelSpec& model, std::span<double> u);

}  // namespace reference

}  // namespace rsoc
