#include "rsoc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsoc/errors.hpp"

namespace rsoc {

int OrthantDomain::cells_per_axis() const { return static_cast<int>(std::lround(box_side / step)); }

void OrthantDomain::validate() const {
  if (dim < 1 || dim > kMaxDim) {
    std::ostringstream os;
    os << "dim must be in [1, " << kMaxDim << "], got " << dim;
    throw ValidationError(os.str());
  }
  if (!(box_side > 0.0)) throw ValidationError("box_side must be > 0");
  if (!(step > 0.0)) throw ValidationError("grid_step must be > 0");
  const double ratio = box_side / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ValidationError("box_side / grid_step must be an integer");
  }
  if (rounded < 4) throw ValidationError("box_side / grid_step must be >= 4");
}

Grid::Grid(const OrthantDomain& domain) : domain_(domain) {
  domain_.validate();
  n_ = domain_.cells_per_axis() + 1;
  std::size_t s = 1;
  for (int i = 0; i < domain_.dim; ++i) {
    stride_[i] = s;
    s *= static_cast<std::size_t>(n_);
  }
  size_ = s;
}

MultiIndex Grid::multi_index(std::size_t idx) const noexcept {
  MultiIndex m{};
  for (int i = 0; i < domain_.dim; ++i) {
    m[i] = static_cast<int>(idx % static_cast<std::size_t>(n_));
    idx /= static_cast<std::size_t>(n_);
  }
  return m;
}

std::size_t Grid::flat_index(const MultiIndex& m) const noexcept {
  std::size_t idx = 0;
  for (int i = 0; i < domain_.dim; ++i) idx += static_cast<std::size_t>(m[i]) * stride_[i];
  return idx;
}

Vec Grid::coord(std::size_t idx) const noexcept {
  const MultiIndex m = multi_index(idx);
  Vec x(domain_.dim);
  for (int i = 0; i < domain_.dim; ++i) x[i] = m[i] * domain_.step;
  return x;
}

int Grid::inner_face(std::size_t idx) const noexcept {
  const MultiIndex m = multi_index(idx);
  for (int i = 0; i < domain_.dim; ++i)
    if (m[i] == 0) return i;
  return -1;
}

int Grid::outer_face(std::size_t idx) const noexcept {
  const MultiIndex m = multi_index(idx);
  for (int i = 0; i < domain_.dim; ++i)
    if (m[i] == n_ - 1) return i;
  return -1;
}

int Grid::inner_face_count(std::size_t idx) const noexcept {
  const MultiIndex m = multi_index(idx);
  int c = 0;
  for (int i = 0; i < domain_.dim; ++i) c += (m[i] == 0);
  return c;
}

bool Grid::on_inner_face(std::size_t idx, int axis) const noexcept {
  return multi_index(idx)[axis] == 0;
}

bool Grid::is_interior(std::size_t idx) const noexcept {
  const MultiIndex m = multi_index(idx);
  for (int i = 0; i < domain_.dim; ++i)
    if (m[i] == 0 || m[i] == n_ - 1) return false;
  return true;
}

std::size_t Grid::nearest(const Vec& x) const noexcept {
  MultiIndex m{};
  for (int i = 0; i < domain_.dim; ++i) {
    const long j = std::lround(x[i] / domain_.step);
    m[i] = static_cast<int>(std::clamp<long>(j, 0, n_ - 1));
  }
  return flat_index(m);
}

InterpStencil Grid::stencil(const Vec& x) const noexcept {
  std::array<int, kMaxDim> lo{};
  std::array<double, kMaxDim> frac{};
  for (int i = 0; i < domain_.dim; ++i) {
    const double xi = std::clamp(x[i], 0.0, domain_.box_side) / domain_.step;
    int j = static_cast<int>(std::floor(xi));
    j = std::clamp(j, 0, n_ - 2);
    lo[i] = j;
    frac[i] = std::clamp(xi - j, 0.0, 1.0);
  }
  InterpStencil s;
  const int corners = 1 << domain_.dim;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int i = 0; i < domain_.dim; ++i) {
      const bool up = (c >> i) & 1;
      w *= up ? frac[i] : 1.0 - frac[i];
      idx += static_cast<std::size_t>(lo[i] + (up ? 1 : 0)) * stride_[i];
    }
    if (w == 0.0) continue;
    s.node[s.count] = idx;
    s.weight[s.count] = w;
    ++s.count;
  }
  return s;
}

double Grid::interpolate(std::span<const double> values, const Vec& x) const noexcept {
  const InterpStencil s = stencil(x);
  double v = 0.0;
  for (int k = 0; k < s.count; ++k) v += s.weight[k] * values[s.node[k]];
  return v;
}

std::vector<std::size_t> Grid::nodes_in_box(double lo, double hi) const {
  std::vector<std::size_t> out;
  const double eps = 1e-12 * domain_.box_side;
  for (std::size_t p = 0; p < size_; ++p) {
    const Vec x = coord(p);
    bool inside = true;
    for (int i = 0; i < domain_.dim; ++i)
      if (x[i] < lo - eps || x[i] > hi + eps) inside = false;
    if (inside) out.push_back(p);
  }
  return out;
}

std::vector<std::size_t> Grid::probe_box() const {
  return nodes_in_box(0.25 * domain_.box_side, 0.75 * domain_.box_side);
}

}  // namespace rsoc
