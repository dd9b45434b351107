#pragma once

#include <cstddef>
#include <span>

namespace rsoc::stats {

/// ln sum_i exp(v_i); -inf for an empty span.
double logsumexp(std::span<const double> v) noexcept;
/// ln( (1/n) sum_i exp(v_i) )
double log_mean_exp(std::span<const double> v) noexcept;

struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error (n - 1 denominator).
MeanSe mean_se(std::span<const double> v);

/// ln E[e^A] from samples of A, with its standard error from `batches`
/// contiguous batch estimates (batch means on the log scale).
MeanSe log_mean_exp_batched(std::span<const double> a, int batches = 16);

struct Regression {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares y ~ intercept + slope x.
Regression linear_regression(std::span<const double> x, std::span<const double> y);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion at normal quantile z.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

}  // namespace rsoc::stats
