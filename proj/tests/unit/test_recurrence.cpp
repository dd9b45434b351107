#include <doctest.h>
#include <cmath>
#include "helpers.hpp"
#include "rsoc/errors.hpp"
#include "rsoc/recurrence_probe.hpp"

using namespace rsoc;

namespace {

/// P_x(hit b before R) for reflected BM with drift mu, x in [b, R].
double scale_oracle(double mu, double x, double b, double R) {
  if (mu == 0.0) return (R - x) / (R - b);
  auto S = [&](double y) { return -std::exp(-2.0 * mu * y) / (2.0 * mu); };
  return (S(R) - S(x)) / (S(R) - S(b));
}

}  // namespace

TEST_CASE("hitting probability matches the scale function in 1-D") {
  for (double mu : {-0.5, 0.0, 0.5}) {
    const ModelSpec m = testing::rbm_1d(mu, 8, 0.0625);
    const Ball target{Vec{1.0}, 0.5};
    const double R = 6.0;
    const HittingField hf = hitting_probability_pde(m, ControlPolicy::constant({1.0}), target, R);
    CHECK(hf.residual <= 1e-10);
    for (double x : {2.0, 3.0, 4.5}) CHECK(hf.at(Vec{x}) == doctest::Approx(scale_oracle(mu, x, 1.5, R)).epsilon(1e-2));
    CHECK(hf.at(Vec{0.25}) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(hf.at(Vec{1.0}) == 1.0);
  }
}

TEST_CASE("hitting probability needs a stationary policy") {
  const ModelSpec m = testing::rbm_1d(0.0, 8, 0.25);
  const ControlPolicy fb = ControlPolicy::feedback(1, [](double, const Vec&, double, std::span<double> w) { w[0] = 1.0; });
  CHECK_THROWS_AS(hitting_probability_pde(m, fb, Ball{Vec{1.0}, 0.5}, 4.0), ValidationError);
}

TEST_CASE("classification of drifted reflected BM") {
  const Ball target{Vec{2.0}, 0.8};
  const Vec q{3.8};
  auto radii = [&] {
    std::vector<double> r;
    for (int j = 0; j < 5; ++j) r.push_back(2.8 + 12.0 * std::pow(2.0, j));
    return r;
  }();
  const ModelSpec neg = testing::rbm_1d(-0.5, 8, 0.125);
  const RecurrenceReport rn = classify_recurrence(neg, ControlPolicy::constant({1.0}), target, q, radii);
  CHECK(rn.verdict == Verdict::recurrent);
  CHECK(rn.monotone_in_R);
  const ModelSpec pos = testing::rbm_1d(0.5, 8, 0.125);
  const RecurrenceReport rp = classify_recurrence(pos, ControlPolicy::constant({1.0}), target, q, radii);
  CHECK(rp.verdict == Verdict::transient);
  CHECK(rp.limit_estimate == doctest::Approx(std::exp(-2.0 * 0.5 * 1.0)).epsilon(1e-2));
  CHECK(std::string(to_string(Verdict::inconclusive)) == "inconclusive");
}

TEST_CASE("Monte Carlo hitting is deterministic and lies in its interval") {
  const ModelSpec m = testing::rbm_1d(-0.5, 8, 0.25);
  const Ball target{Vec{1.0}, 0.5};
  const McOptions mc{1e-2, 400, 17, Exec::parallel};
  const HitReport a = hitting_time_mc(m, ControlPolicy::constant({1.0}), target, Vec{3.0}, 20.0, mc);
  const HitReport b = hitting_time_mc(m, ControlPolicy::constant({1.0}), target, Vec{3.0}, 20.0, mc);
  CHECK(a.hits == b.hits);
  CHECK(a.mean_time == b.mean_time);
  CHECK(a.interval.lo <= a.fraction);
  CHECK(a.fraction <= a.interval.hi);
  CHECK(a.fraction > 0.95);
}
