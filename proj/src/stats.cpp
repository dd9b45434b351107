#include "rsoc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rsoc/errors.hpp"

namespace rsoc::stats {

double logsumexp(std::span<const double> v) noexcept {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_mean_exp(std::span<const double> v) noexcept {
  return logsumexp(v) - std::log(static_cast<double>(v.size()));
}

MeanSe mean_se(std::span<const double> v) {
  if (v.size() < 2) throw ValidationError("need at least 2 samples for a standard error");
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

MeanSe log_mean_exp_batched(std::span<const double> a, int batches) {
  if (a.size() < 2) throw ValidationError("need at least 2 paths for a standard error");
  const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(batches), a.size());
  std::vector<double> est(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * a.size() / nb;
    const std::size_t hi = (b + 1) * a.size() / nb;
    est[b] = log_mean_exp(a.subspan(lo, hi - lo));
  }
  const MeanSe batch = mean_se(est);
  return {log_mean_exp(a), batch.std_error};
}

Regression linear_regression(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw ValidationError("regression needs >= 3 paired samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Regression r;
  if (sxx == 0.0) {
    r.intercept = my;
    return r;
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - r.intercept - r.slope * x[i];
    rss += e * e;
  }
  r.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return r;
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace rsoc::stats
