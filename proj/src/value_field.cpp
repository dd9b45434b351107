#include "rsoc/value_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsoc/errors.hpp"

namespace rsoc {
namespace {

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -INFINITY) return a;
  return a + std::log1p(std::exp(b - a));
}

// Bracketing pair (lo, lambda) with theta = (1 - lambda) theta_lo + lambda theta_{lo+1}.
std::pair<std::size_t, double> bracket(const ValueField& f, double theta) {
  const double tol = 1e-12;
  if (f.slices.empty()) throw InterpolationError("empty value field");
  if (theta < f.theta_min() - tol || theta > f.theta_max() + tol) {
    std::ostringstream os;
    os << "theta = " << theta << " outside the tabulated range [" << f.theta_min() << ", " << f.theta_max()
       << "]; enlarge the theta grid (lower kappa)";
    throw InterpolationError(os.str());
  }
  if (f.slices.size() == 1) return {0, 0.0};
  auto it = std::upper_bound(f.slices.begin(), f.slices.end(), theta,
                             [](double t, const ValueSlice& s) { return t < s.theta; });
  std::size_t hi = static_cast<std::size_t>(it - f.slices.begin());
  hi = std::clamp<std::size_t>(hi, 1, f.slices.size() - 1);
  const std::size_t lo = hi - 1;
  const double span = f.slices[hi].theta - f.slices[lo].theta;
  const double lambda = std::clamp((theta - f.slices[lo].theta) / span, 0.0, 1.0);
  return {lo, lambda};
}

}  // namespace

double ValueField::log_u(std::size_t slice, std::size_t node) const {
  const ValueSlice& s = slices[slice];
  return std::log(s.w[node]) + s.log_scale;
}

double ValueField::log_u_at(double theta, const Vec& x) const {
  const auto [lo, lambda] = bracket(*this, theta);
  const Grid g = grid();
  const double a = std::log(g.interpolate(slices[lo].w, x)) + slices[lo].log_scale;
  if (lambda == 0.0) return a;
  const double b = std::log(g.interpolate(slices[lo + 1].w, x)) + slices[lo + 1].log_scale;
  if (lambda == 1.0) return b;
  return log_add(std::log1p(-lambda) + a, std::log(lambda) + b);
}

ValueSlice ValueField::slice_at(double theta) const {
  const auto [lo, lambda] = bracket(*this, theta);
  if (lambda == 0.0) return slices[lo];
  if (lambda == 1.0) return slices[lo + 1];
  const ValueSlice& a = slices[lo];
  const ValueSlice& b = slices[lo + 1];
  const double s = std::max(a.log_scale, b.log_scale);
  const double ca = (1.0 - lambda) * std::exp(a.log_scale - s);
  const double cb = lambda * std::exp(b.log_scale - s);
  ValueSlice out;
  out.theta = theta;
  out.log_scale = s;
  out.w.resize(a.w.size());
  for (std::size_t p = 0; p < a.w.size(); ++p) out.w[p] = ca * a.w[p] + cb * b.w[p];
  return out;
}

std::size_t ValueField::nearest_slice(double theta) const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < slices.size(); ++j)
    if (std::abs(slices[j].theta - theta) < std::abs(slices[best].theta - theta)) best = j;
  return best;
}

}  // namespace rsoc
