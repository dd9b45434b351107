#include <doctest.h>
#include <cmath>
#include <Eigen/Dense>
#include "helpers.hpp"
#include "rsoc/errors.hpp"
#include "rsoc/hjb_ergodic.hpp"

using namespace rsoc;

TEST_CASE("constant cost gives g = c, phi = c / alpha") {
  const ModelSpec m = testing::constant_cost(0.7, 0.5);
  const ValueField f = solve_discounted(m);
  const PhiG pg = compute_phi_g(f);
  for (double v : pg.g_last()) CHECK(v == doctest::Approx(0.7).epsilon(1e-9));
  for (double v : pg.phi.back()) CHECK(v == doctest::Approx(1.4).epsilon(1e-9));
  CHECK(pg.bound == doctest::Approx(2.1));
  CHECK(pg.bound_pass);
}

TEST_CASE("normalization pins x0 to one") {
  const ModelSpec m = testing::canonical_1d(0.25);
  const ValueField f = solve_discounted(m);
  const ValueField n = normalize_at(f, m.x0_index());
  for (const ValueSlice& s : n.slices) {
    CHECK(s.log_scale == 0.0);
    CHECK(s.w[m.x0_index()] == 1.0);
  }
}

TEST_CASE("vanishing discount on constant cost returns rho = c with zero residual") {
  const ModelSpec m = testing::constant_cost(1.3, 1.0);
  VanishingOptions o;
  o.alphas = {1.0, 0.5, 0.25};
  const RhoEstimate est = vanishing_discount_run(m, o);
  CHECK(est.rho == doctest::Approx(1.3).epsilon(1e-9));
  REQUIRE(est.table.size() == 6);
  for (const RhoEntry& e : est.table) {
    CHECK(e.spatial_variation <= 1e-9);
    CHECK(e.harnack_ratio == doctest::Approx(1.0));
    CHECK(e.phi_bound_pass);
    CHECK(e.bounds_pass);
  }
  const ErgodicResidual r = ergodic_residual(m.with_cost_cutoff(est.k_final), est.rho, est.u_hat, &est.policy());
  CHECK(r.interior_max <= 1e-8);
  CHECK(r.boundary_max <= 1e-8);
}

TEST_CASE("truncated cost vanishes beyond k + 1") {
  const ModelSpec m = testing::canonical_1d();
  const CoefficientField rk = truncate_cost(m.coeffs, 4.0);
  CHECK(rk.cost(Vec{3.5}, 0) == doctest::Approx(2.0));
  CHECK(rk.cost(Vec{5.5}, 1) == 0.0);
}

TEST_CASE("near-monotone check") {
  const ModelSpec m = testing::canonical_1d();
  const NearMonotoneReport hi = check_near_monotone(m.coeffs, 1.0, m.domain);
  CHECK(hi.shell_min == doctest::Approx(2.0));
  CHECK(hi.pass);
  const NearMonotoneReport lo = check_near_monotone(m.coeffs, 2.0, m.domain);
  CHECK_FALSE(lo.pass);
  CHECK_FALSE(lo.label.empty());
}

TEST_CASE("phi/g needs at least three slices") {
  ValueField f;
  f.domain = OrthantDomain{1, 1.0, 0.25};
  f.slices.resize(2);
  CHECK_THROWS_AS(compute_phi_g(f), ValidationError);
}

TEST_CASE("rho matches the principal eigenvalue of the one-action generator") {
  const ModelSpec m = testing::model_from("step = 0.125\nactions = down\ndrift = -1\n");
  VanishingOptions o;
  o.ks = {12.0};
  o.alphas = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  const RhoEstimate est = vanishing_discount_run(m, o);

  // 1/2 u'' - u' + r u on [0, 8] with mirrored ghost nodes at both ends
  const Grid g = m.grid();
  const int n = static_cast<int>(g.size());
  const double h = m.domain.step;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int lo = i == 0 ? 1 : i - 1;
    const int hi = i == n - 1 ? n - 2 : i + 1;
    A(i, lo) += 0.5 / (h * h) + 1.0 / h;
    A(i, hi) += 0.5 / (h * h);
    A(i, i) += -1.0 / (h * h) - 1.0 / h + std::min(g.coord(i)[0], 2.0);
  }
  const Eigen::VectorXcd ev = A.eigenvalues();
  double top = -1e300;
  for (int i = 0; i < n; ++i) top = std::max(top, ev[i].real());
  CHECK(est.rho == doctest::Approx(top).epsilon(0.03));
}
