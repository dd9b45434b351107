#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rsoc/vec.hpp"

namespace rsoc {

/// Truncated orthant [0, L]^d discretized with spacing h.
struct OrthantDomain {
  int dim = 1;
  double box_side = 1.0;  // L
  double step = 0.25;     // h

  /// Throws ValidationError unless d in [1, kMaxDim], L > 0 and L/h is an
  /// integer >= 4.
  void validate() const;
  int cells_per_axis() const;
};

using MultiIndex = std::array<int, kMaxDim>;

/// Up to 2^d (node, weight) pairs of a multilinear interpolation.
struct InterpStencil {
  std::array<std::size_t, 1 << kMaxDim> node{};
  std::array<double, 1 << kMaxDim> weight{};
  int count = 0;
};

/// Tensor-product node set of an OrthantDomain. Axis 0 varies fastest.
///
/// Face bookkeeping: a node is on inner face i when its i-th coordinate is 0
/// and on outer face i when it equals L. `inner_face` / `outer_face` return the
/// lowest such axis (or -1), which is the tag used to resolve corners.
class Grid {
 public:
  explicit Grid(const OrthantDomain& domain);

  const OrthantDomain& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim; }
  double step() const noexcept { return domain_.step; }
  double box_side() const noexcept { return domain_.box_side; }
  int nodes_per_axis() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const noexcept { return stride_[axis]; }

  MultiIndex multi_index(std::size_t idx) const noexcept;
  std::size_t flat_index(const MultiIndex& m) const noexcept;
  Vec coord(std::size_t idx) const noexcept;

  int inner_face(std::size_t idx) const noexcept;
  int outer_face(std::size_t idx) const noexcept;
  int inner_face_count(std::size_t idx) const noexcept;
  bool on_inner_face(std::size_t idx, int axis) const noexcept;
  bool is_interior(std::size_t idx) const noexcept;

  /// Nearest node to x after clamping x into the box.
  std::size_t nearest(const Vec& x) const noexcept;
  InterpStencil stencil(const Vec& x) const noexcept;
  double interpolate(std::span<const double> values, const Vec& x) const noexcept;

  /// Nodes whose coordinates all lie in [lo, hi] (closed, per axis).
  std::vector<std::size_t> nodes_in_box(double lo, double hi) const;
  /// Nodes of the central half of the box, [L/4, 3L/4]^d.
  std::vector<std::size_t> probe_box() const;

 private:
  OrthantDomain domain_;
  int n_ = 0;
  std::size_t size_ = 0;
  std::array<std::size_t, kMaxDim> stride_{};
};

}  // namespace rsoc
