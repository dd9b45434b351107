#include "rsoc/hjb_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <sstream>

#include "rsoc/errors.hpp"

namespace rsoc {
namespace {

std::size_t shift(const Grid& g, std::size_t p, int axis, int delta) {
  return delta > 0 ? p + g.stride(axis) : p - g.stride(axis);
}

bool has_neighbor(const Grid& g, const MultiIndex& m, int axis, int delta) {
  const int j = m[axis] + delta;
  return j >= 0 && j < g.nodes_per_axis();
}

int face_count(const Grid& g, std::size_t p) {
  const MultiIndex m = g.multi_index(p);
  int n = 0;
  for (int i = 0; i < g.dim(); ++i)
    if (m[i] == 0 || m[i] == g.nodes_per_axis() - 1) ++n;
  return n;
}

void require_dominant(const Mat& a, int d, const Vec& x) {
  for (int i = 0; i < d; ++i) {
    double off = 0.0;
    for (int j = 0; j < d; ++j)
      if (j != i) off += std::abs(a(i, j));
    if (off > a(i, i) * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "diffusion matrix is not diagonally dominant at x = (";
      for (int k = 0; k < d; ++k) os << (k ? ", " : "") << x[k];
      os << ") row " << i << "; the positive cross-term stencil needs a_ii >= sum_j |a_ij|";
      throw ConfigError(os.str());
    }
  }
}

// Source stencil of the boundary relation at p, with any self-weight folded
// back into the remaining sources.
InterpStencil boundary_source(const ModelSpec& model, const Grid& g, std::size_t p) {
  const Vec x = g.coord(p);
  const int d = g.dim();
  const double h = g.step();
  const double L = g.box_side();
  Vec y = x;
  const int inner = g.inner_face(p);
  if (inner >= 0) {
    const Vec gam = model.coeffs.gamma(x, inner);
    if (!(gam[inner] > 0.0)) {
      std::ostringstream os;
      os << "reflection direction has no inward component on face " << inner << " at node " << p;
      throw SolverError(os.str());
    }
    for (int i = 0; i < d; ++i) y[i] = std::clamp(x[i] + h * gam[i] / gam[inner], 0.0, L);
  } else {
    const int outer = g.outer_face(p);
    y[outer] = x[outer] - h;
  }
  InterpStencil st = g.stencil(y);
  double self = 0.0;
  InterpStencil out;
  for (int k = 0; k < st.count; ++k) {
    if (st.node[k] == p) {
      self += st.weight[k];
    } else {
      out.node[out.count] = st.node[k];
      out.weight[out.count] = st.weight[k];
      ++out.count;
    }
  }
  if (self >= 1.0 - 1e-12 || out.count == 0) {
    std::ostringstream os;
    os << "degenerate boundary relation at node " << p;
    throw SolverError(os.str());
  }
  for (int k = 0; k < out.count; ++k) out.weight[k] /= (1.0 - self);
  return out;
}

double relation_value(std::span<const double> u, const InterpStencil& s) noexcept {
  double v = 0.0;
  for (int k = 0; k < s.count; ++k) v += s.weight[k] * u[s.node[k]];
  return v;
}

constexpr int kBoundaryPasses = 200;

}  // namespace

HjbOperator::HjbOperator(const ModelSpec& model)
    : grid_(model.domain), num_actions_(model.coeffs.num_actions()), bounds_(model.coeffs.bounds(grid_)) {
  const int d = grid_.dim();
  const double h = grid_.step();
  const double h2 = h * h;
  const std::size_t n = grid_.size();
  if (n > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("grid too large");
  diffusion_.resize(n);
  drift_.resize(n * static_cast<std::size_t>(num_actions_));

  for (std::size_t p = 0; p < n; ++p) {
    const Vec x = grid_.coord(p);
    const MultiIndex m = grid_.multi_index(p);

    for (int s = 0; s < num_actions_; ++s) {
      DriftRow& row = drift_[p * static_cast<std::size_t>(num_actions_) + static_cast<std::size_t>(s)];
      const Vec b = model.coeffs.drift(x, s);
      for (int i = 0; i < d; ++i) {
        if (b[i] == 0.0) continue;
        const int dir = b[i] > 0.0 ? 1 : -1;
        if (!has_neighbor(grid_, m, i, dir)) continue;
        row.nb[row.count] = static_cast<std::uint32_t>(shift(grid_, p, i, dir));
        row.c[row.count] = std::abs(b[i]) / h;
        ++row.count;
      }
      row.cost = model.coeffs.cost(x, s);
    }

    if (!grid_.is_interior(p)) {
      boundary_.push_back({static_cast<std::uint32_t>(p), face_count(grid_, p), boundary_source(model, grid_, p)});
      continue;
    }
    interior_.push_back(static_cast<std::uint32_t>(p));
    const Mat& a = model.coeffs.diffusion(x);
    require_dominant(a, d, x);
    DiffusionRow& row = diffusion_[p];
    auto add = [&](std::size_t q, double c) {
      if (c == 0.0) return;
      row.nb[row.count] = static_cast<std::uint32_t>(q);
      row.c[row.count] = c;
      ++row.count;
    };
    for (int i = 0; i < d; ++i) {
      double off = 0.0;
      for (int j = 0; j < d; ++j)
        if (j != i) off += std::abs(a(i, j));
      const double c = 0.5 * (a(i, i) - off) / h2;
      add(shift(grid_, p, i, -1), c);
      add(shift(grid_, p, i, +1), c);
    }
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const double aij = a(i, j);
        if (aij == 0.0) continue;
        const double c = 0.5 * std::abs(aij) / h2;
        const int sj = aij > 0.0 ? 1 : -1;
        add(shift(grid_, shift(grid_, p, i, +1), j, sj), c);
        add(shift(grid_, shift(grid_, p, i, -1), j, -sj), c);
      }
    }
  }
  std::stable_sort(boundary_.begin(), boundary_.end(),
                   [](const BoundaryRelation& x, const BoundaryRelation& y) { return x.faces < y.faces; });
}

double HjbOperator::monotone_rate(double theta) const noexcept {
  const double h = grid_.step();
  return bounds_.diffusion_trace / (h * h) + bounds_.drift_sup * grid_.dim() / h + theta * bounds_.cost_sup;
}

double HjbOperator::diffusion(std::span<const double> u, std::size_t p) const noexcept {
  const DiffusionRow& row = diffusion_[p];
  const double up = u[p];
  double v = 0.0;
  for (int k = 0; k < row.count; ++k) v += row.c[k] * (u[row.nb[k]] - up);
  return v;
}

double HjbOperator::drift_cost(std::span<const double> u, std::size_t p, int s, double theta) const noexcept {
  const DriftRow& row = drift_row(p, s);
  const double up = u[p];
  double v = theta * row.cost * up;
  for (int k = 0; k < row.count; ++k) v += row.c[k] * (u[row.nb[k]] - up);
  return v;
}

double HjbOperator::hamiltonian(std::span<const double> u, std::size_t p, double theta, int* arg) const noexcept {
  double best = drift_cost(u, p, 0, theta);
  int best_s = 0;
  for (int s = 1; s < num_actions_; ++s) {
    const double v = drift_cost(u, p, s, theta);
    if (v < best) {
      best = v;
      best_s = s;
    }
  }
  if (arg) *arg = best_s;
  return diffusion(u, p) + best;
}

double HjbOperator::relaxed(std::span<const double> u, std::size_t p, std::span<const double> w,
                            double theta) const noexcept {
  double v = diffusion(u, p);
  for (int s = 0; s < num_actions_; ++s)
    if (w[static_cast<std::size_t>(s)] != 0.0) v += w[static_cast<std::size_t>(s)] * drift_cost(u, p, s, theta);
  return v;
}

namespace {

inline double march_node(const HjbOperator& op, std::span<const double> w, std::size_t p, double lambda,
                         double cost_scale) noexcept {
  const double base = w[p] + lambda * op.diffusion(w, p);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < op.num_actions(); ++s) {
    const DriftRow& row = op.drift_row(p, s);
    double v = base;
    for (int k = 0; k < row.count; ++k) v += lambda * row.c[k] * (w[row.nb[k]] - w[p]);
    v *= std::exp(row.cost * cost_scale);
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

void HjbOperator::step(std::span<const double> w, std::span<double> out, double lambda, double cost_scale,
                       Exec exec) const {
  std::copy(w.begin(), w.end(), out.begin());
  const long n = static_cast<long>(interior_.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
      const std::size_t p = interior_[static_cast<std::size_t>(k)];
      out[p] = march_node(*this, w, p, lambda, cost_scale);
    }
  } else {
    for (long k = 0; k < n; ++k) {
      const std::size_t p = interior_[static_cast<std::size_t>(k)];
      out[p] = march_node(*this, w, p, lambda, cost_scale);
    }
  }
}

int HjbOperator::apply_boundary(std::span<double> u) const {
  for (int pass = 1; pass <= kBoundaryPasses; ++pass) {
    double change = 0.0;
    for (const BoundaryRelation& rel : boundary_) {
      const double v = relation_value(u, rel.source);
      const double prev = u[rel.node];
      change = std::max(change, std::abs(v - prev) / std::max(std::abs(v), 1e-300));
      u[rel.node] = v;
    }
    if (change <= 1e-15) return pass;
  }
  return kBoundaryPasses;
}

double HjbOperator::boundary_residual(std::span<const double> u) const noexcept {
  double r = 0.0;
  for (const BoundaryRelation& rel : boundary_)
    r = std::max(r, std::abs(u[rel.node] - relation_value(u, rel.source)));
  return r / grid_.step();
}

namespace reference {

void hjb_step(const ModelSpec& model, std::span<const double> w, std::span<double> out, double lambda,
              double cost_scale) {
  const Grid g(model.domain);
  const int d = g.dim();
  const double h = g.step();
  for (std::size_t p = 0; p < g.size(); ++p) {
    out[p] = w[p];
    if (!g.is_interior(p)) continue;
    const Vec x = g.coord(p);
    const Mat& a = model.coeffs.diffusion(x);
    double diff = 0.0;
    for (int i = 0; i < d; ++i) {
      double off = 0.0;
      for (int j = 0; j < d; ++j)
        if (j != i) off += std::abs(a(i, j));
      const double c = 0.5 * (a(i, i) - off) / (h * h);
      diff += c * (w[shift(g, p, i, -1)] - w[p]) + c * (w[shift(g, p, i, +1)] - w[p]);
    }
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const double aij = a(i, j);
        if (aij == 0.0) continue;
        const double c = 0.5 * std::abs(aij) / (h * h);
        const int sj = aij > 0.0 ? 1 : -1;
        diff += c * (w[shift(g, shift(g, p, i, +1), j, sj)] - w[p]);
        diff += c * (w[shift(g, shift(g, p, i, -1), j, -sj)] - w[p]);
      }
    }
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < model.coeffs.num_actions(); ++s) {
      const Vec b = model.coeffs.drift(x, s);
      double v = w[p] + lambda * diff;
      for (int i = 0; i < d; ++i) {
        if (b[i] > 0.0) v += lambda * (b[i] / h) * (w[shift(g, p, i, +1)] - w[p]);
        if (b[i] < 0.0) v += lambda * (-b[i] / h) * (w[shift(g, p, i, -1)] - w[p]);
      }
      best = std::min(best, v * std::exp(model.coeffs.cost(x, s) * cost_scale));
    }
    out[p] = best;
  }
}

void apply_boundary(const ModelSpec& model, std::span<double> u) {
  const Grid g(model.domain);
  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < g.size(); ++p)
    if (!g.is_interior(p)) order.push_back(p);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return face_count(g, a) < face_count(g, b); });
  for (int pass = 0; pass < kBoundaryPasses; ++pass) {
    double change = 0.0;
    for (std::size_t p : order) {
      const double v = relation_value(u, boundary_source(model, g, p));
      change = std::max(change, std::abs(v - u[p]) / std::max(std::abs(v), 1e-300));
      u[p] = v;
    }
    if (change <= 1e-15) return;
  }
}

}  // namespace reference
}  // namespace rsoc
