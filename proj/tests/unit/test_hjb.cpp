#include <doctest.h>
#include <cmath>
#include <random>
#include "helpers.hpp"
#include "rsoc/errors.hpp"
#include "rsoc/hjb_discounted.hpp"
#include "rsoc/hjb_kernels.hpp"

using namespace rsoc;

namespace {

std::vector<double> random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

ModelSpec oblique_2d() {
  return testing::model_from(
      "dim = 2\nbox_side = 3\nstep = 0.25\ndrift = -1 -0.5; 1 0.5\nsigma = 1 0.2 0.2 0.9\n"
      "gamma = constant\ngamma_dir = 1 0.3\n");
}

}  // namespace

TEST_CASE("stencil step matches the reference evaluation") {
  for (const ModelSpec& m : {testing::canonical_1d(0.25), oblique_2d()}) {
    const HjbOperator op(m);
    const auto w = random_field(op.grid().size(), 3);
    std::vector<double> a(w.size()), b(w.size()), c(w.size());
    const double lambda = 0.5 / op.monotone_rate(0.0);
    op.step(w, a, lambda, 0.01, Exec::serial);
    op.step(w, c, lambda, 0.01, Exec::parallel);
    reference::hjb_step(m, w, b, lambda, 0.01);
    CHECK(a == c);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("boundary relations match the reference and are reproduced exactly") {
  const ModelSpec m = oblique_2d();
  const HjbOperator op(m);
  auto u = random_field(op.grid().size(), 5);
  auto v = u;
  op.apply_boundary(u);
  reference::apply_boundary(m, v);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(v[i]).epsilon(1e-12));
  CHECK(op.boundary_residual(u) <= 1e-13);
}

TEST_CASE("constant functions are fixed points of the transport part") {
  const ModelSpec m = oblique_2d();
  const HjbOperator op(m);
  std::vector<double> one(op.grid().size(), 1.0);
  for (std::size_t p : op.interior()) CHECK(op.diffusion(one, p) == doctest::Approx(0.0));
  std::vector<double> out(one.size());
  op.step(one, out, 0.5 / op.monotone_rate(0.0), 0.0, Exec::serial);
  for (double x : out) CHECK(x == doctest::Approx(1.0));
}

TEST_CASE("step is monotone under the rate bound") {
  const ModelSpec m = oblique_2d();
  const HjbOperator op(m);
  auto w = random_field(op.grid().size(), 8);
  auto w2 = w;
  w2[op.interior()[3]] += 0.1;
  std::vector<double> a(w.size()), b(w.size());
  const double lambda = 1.0 / op.monotone_rate(0.0);
  op.step(w, a, lambda, 0.0, Exec::serial);
  op.step(w2, b, lambda, 0.0, Exec::serial);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] >= a[i]);
}

TEST_CASE("hamiltonian ties pick the lowest action index") {
  const ModelSpec m = testing::canonical_1d(0.25);
  const HjbOperator op(m);
  std::vector<double> flat(op.grid().size(), 1.0);
  int arg = -1;
  op.hamiltonian(flat, op.interior()[2], 1.0, &arg);
  CHECK(arg == 0);
}

TEST_CASE("constant cost has the closed form exp(theta c / alpha)") {
  for (int d : {1, 2}) {
    const ModelSpec m = testing::constant_cost(1.0, 0.5, d);
    const ValueField f = solve_discounted(m);
    CHECK(f.theta_max() == 1.0);
    for (std::size_t p = 0; p < f.grid().size(); ++p) CHECK(f.log_u(f.size() - 1, p) == doctest::Approx(2.0).epsilon(1e-10));
    const BoundsReport b = verify_bounds(f);
    CHECK(b.pass);
  }
}

TEST_CASE("zero cost gives u = 1") {
  const ValueField f = solve_discounted(testing::rbm_1d(0.5, 4, 0.25));
  for (std::size_t k = 0; k < f.size(); ++k)
    for (std::size_t p = 0; p < f.grid().size(); ++p) CHECK(f.log_u(k, p) == doctest::Approx(0.0));
}

TEST_CASE("dtheta above the monotone bound is rejected with the bound in the message") {
  const ModelSpec m = testing::canonical_1d(0.0625);
  const double bound = max_monotone_dtheta(m);
  DiscountedOptions o;
  o.dtheta = 2.0 * bound;
  try {
    solve_discounted(m, o);
    FAIL("no throw");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("dtheta") != std::string::npos);
  }
}

TEST_CASE("canonical solve respects the a-priori bounds and is serial/parallel identical") {
  const ModelSpec m = testing::canonical_1d(0.125);
  DiscountedOptions ser;
  ser.exec = Exec::serial;
  const ValueField a = solve_discounted(m, ser);
  const ValueField b = solve_discounted(m);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.slices[k].w == b.slices[k].w);
    CHECK(a.slices[k].log_scale == b.slices[k].log_scale);
  }
  const BoundsReport r = verify_bounds(a);
  CHECK(r.pass);
  CHECK(r.upper_slack >= 0.0);
  CHECK(r.lower_slack >= 0.0);
  CHECK(r.theta_monotone);
}

TEST_CASE("value field interpolation") {
  const ValueField f = solve_discounted(testing::canonical_1d(0.25));
  const std::size_t k = f.size() / 2;
  const double th = f.slices[k].theta;
  const Vec x = f.grid().coord(5);
  CHECK(f.log_u_at(th, x) == doctest::Approx(f.log_u(k, 5)).epsilon(1e-12));
  CHECK(f.nearest_slice(th) == k);
  const ValueSlice s = f.slice_at(th);
  CHECK(std::log(s.w[5]) + s.log_scale == doctest::Approx(f.log_u(k, 5)));
  CHECK_THROWS_AS(f.log_u_at(1.5, x), InterpolationError);
  CHECK_THROWS_AS(f.log_u_at(0.5 * f.kappa, x), InterpolationError);
}

TEST_CASE("extracted policy on the canonical model pushes towards the origin near it") {
  const ModelSpec m = testing::canonical_1d(0.125);
  const ValueField f = solve_discounted(m);
  const Policy p = extract_policy(m, f, 1.0);
  const Grid& g = p.grid();
  CHECK(p.action(g.nearest(Vec{1.0})) == 0);
  CHECK(p.action(g.nearest(Vec{2.0})) == 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (double w : p.at(i)) s += w;
    CHECK(s == 1.0);
  }
  CHECK_THROWS(extract_policy(m.with_cost_cutoff(4.0), f, 1.0));
}

TEST_CASE("discrete comparison in the cost") {
  const ModelSpec lo = testing::model_from("step = 0.125\ncost_cap = 1.5\n");
  const ModelSpec hi = testing::model_from("step = 0.125\ncost_cap = 2\n");
  DiscountedOptions o;
  o.dtheta = std::min(max_monotone_dtheta(lo), max_monotone_dtheta(hi));
  const ValueField a = solve_discounted(lo, o);
  const ValueField b = solve_discounted(hi, o);
  for (std::size_t p = 0; p < a.grid().size(); ++p)
    CHECK(a.log_u(a.size() - 1, p) <= b.log_u(b.size() - 1, p));
}
