#include <doctest.h>
#include <cmath>
#include "helpers.hpp"
#include "rsoc/reflected_sde.hpp"
#include "rsoc/rng.hpp"
#include "rsoc/stats.hpp"

using namespace rsoc;

TEST_CASE("split_seed streams differ and are reproducible") {
  CHECK(split_seed(7, 0) != split_seed(7, 1));
  CHECK(split_seed(7, 3) == split_seed(7, 3));
  CounterRng a(11), b(11);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  CounterRng u(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK((v >= 0.0 && v < 1.0));
  }
}

TEST_CASE("skorokhod step with normal reflection in 1-D") {
  const ModelSpec m = testing::canonical_1d();
  const SkorokhodResult r = skorokhod_step(Vec{0.2}, Vec{-0.5}, m.coeffs);
  CHECK(r.y[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.dxi == doctest::Approx(0.3));
  const SkorokhodResult s = skorokhod_step(Vec{0.2}, Vec{0.1}, m.coeffs);
  CHECK(s.dxi == 0.0);
  CHECK(s.y[0] == doctest::Approx(0.3));
  const SkorokhodResult o = skorokhod_step(Vec{7.9}, Vec{0.3}, m.coeffs, 8.0);
  CHECK(o.y[0] == 8.0);
  CHECK(o.touched_outer);
  CHECK(o.dxi == 0.0);
}

TEST_CASE("skorokhod step with oblique reflection in 2-D lands in the orthant") {
  const ModelSpec m =
      testing::model_from("dim = 2\nbox_side = 2\nstep = 0.5\ndrift = -1 -1; 1 1\ngamma = constant\ngamma_dir = 1 0.5\n");
  std::vector<Push> pushes;
  const SkorokhodResult r = skorokhod_step(Vec{0.1, 0.1}, Vec{-0.4, -0.3}, m.coeffs, 2.0, &pushes);
  CHECK(r.y[0] >= 0.0);
  CHECK(r.y[1] >= 0.0);
  CHECK(r.dxi > 0.0);
  double total = 0.0;
  Vec y = Vec{0.1, 0.1} + Vec{-0.4, -0.3};
  for (const Push& p : pushes) {
    CHECK(p.amount >= 0.0);
    total += p.amount;
    y += p.amount * p.gamma;
  }
  CHECK(total == doctest::Approx(r.dxi));
  CHECK(y[0] == doctest::Approx(r.y[0]));
  CHECK(y[1] == doctest::Approx(r.y[1]));
}

TEST_CASE("simulated paths satisfy the invariants and are reproducible") {
  const ModelSpec m = testing::canonical_1d();
  const ControlPolicy pol = ControlPolicy::constant({1.0, 0.0});
  const PathRequest req{Vec{0.5}, 2.0, 1e-2, 42};
  const PathBundle a = simulate_path(m, pol, req);
  const PathBundle b = simulate_path(m, pol, req);
  CHECK(a.x == b.x);
  CHECK(a.xi == b.xi);
  CHECK(a.steps == 200);
  const PathInvariantReport inv = check_path_invariants(a, 1e-12);
  CHECK(inv.confined);
  CHECK(inv.xi_monotone);
  CHECK(inv.complementary);
  CHECK(a.xi.back() > 0.0);
}

TEST_CASE("serial and parallel batches are identical") {
  const ModelSpec m = testing::model_from("dim = 2\nbox_side = 4\nstep = 0.5\ndrift = -1 -1; 1 1\n");
  const ControlPolicy pol = ControlPolicy::constant({0.5, 0.5});
  const auto s = simulate_batch(m, pol, Vec{1.0, 1.0}, 1.0, 1e-2, 64, 9, Exec::serial);
  const auto p = simulate_batch(m, pol, Vec{1.0, 1.0}, 1.0, 1e-2, 64, 9, Exec::parallel);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].x == p[i].x);
    CHECK(s[i].xi == p[i].xi);
    CHECK(s[i].seed == split_seed(9, i));
  }
}

TEST_CASE("weights out of the simplex are rejected for constant policies") {
  CHECK_THROWS(ControlPolicy::constant({0.7, 0.7}));
}

TEST_CASE("stats helpers") {
  const std::vector<double> v{0.0, std::log(3.0)};
  CHECK(stats::logsumexp(v) == doctest::Approx(std::log(4.0)));
  CHECK(stats::log_mean_exp(v) == doctest::Approx(std::log(2.0)));
  const stats::MeanSe ms = stats::mean_se(std::vector<double>{1, 2, 3, 4});
  CHECK(ms.mean == doctest::Approx(2.5));
  CHECK(ms.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const stats::Regression reg = stats::linear_regression(x, y);
  CHECK(reg.slope == doctest::Approx(2.0));
  CHECK(reg.intercept == doctest::Approx(1.0));
  const stats::Interval w = stats::wilson_interval(50, 100);
  CHECK(w.lo < 0.5);
  CHECK(w.hi > 0.5);
  CHECK(w.hi - 0.5 == doctest::Approx(0.5 - w.lo));
}

TEST_CASE("larger drift dominates pathwise under common noise") {
  const ModelSpec lo = testing::rbm_1d(0.2);
  const ModelSpec hi = testing::rbm_1d(0.5);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const PathRequest req{Vec{0.3}, 3.0, 1e-2, seed};
    const PathBundle a = simulate_path(lo, ControlPolicy::constant({1.0}), req);
    const PathBundle b = simulate_path(hi, ControlPolicy::constant({1.0}), req);
    for (std::size_t i = 0; i < a.x.size(); ++i) CHECK(b.x[i] >= a.x[i]);
  }
}
