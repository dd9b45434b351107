#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rsoc/cost_functionals.hpp"
#include "rsoc/domain_model.hpp"
#include "rsoc/policy.hpp"

namespace rsoc {

enum class TestFunctionKind { one, linear, square, cosine, gaussian };

/// Catalog test function f = base * taper. The taper is a product over axes of
/// a C^2 quintic step, 1 below 0.6 L and 0 above 0.9 L, so f vanishes near the
/// outer faces.
class TestFunction {
 public:
  TestFunction(TestFunctionKind kind, int dim, double box_side);

  TestFunctionKind kind() const noexcept { return kind_; }
  std::string name() const;
  double value(const Vec& x) const noexcept;
  Vec gradient(const Vec& x) const noexcept;
  Mat hessian(const Vec& x) const noexcept;

 private:
  TestFunctionKind kind_;
  int dim_;
  double box_side_;
  Vec center_;  // gaussian bump center
};

std::vector<TestFunction> test_function_catalog(int dim, double box_side);

/// b(x, v) . grad f + 1/2 tr(a(x) D^2 f), analytic derivatives.
double apply_generator(const CoefficientField& coeffs, const TestFunction& f, const Vec& x,
                       std::span<const double> weights);

/// min over inner-face grid nodes (and each face they lie on) of grad f . gamma.
double boundary_sign_margin(const CoefficientField& coeffs, const TestFunction& f, const Grid& grid);

struct MartingaleTestSpec {
  std::vector<TestFunction> functions;
  std::vector<double> checkpoints{0.5, 1.0};  // increments between consecutive checkpoints, from t = 0
  Vec start;
};

struct IncrementStat {
  double s = 0.0;
  double t = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double slope_z = 0.0;  // max over coordinates of |slope / se| of the regression on X_s
};

struct FunctionResidual {
  std::string name;
  bool boundary_ok = true;
  double boundary_margin = 0.0;
  std::vector<IncrementStat> increments;
  double max_z = 0.0;
  bool pass = false;
};

struct MartingaleReport {
  std::vector<FunctionResidual> functions;
  double max_z = 0.0;
  bool pass = false;
};

/// M_f(t) = f(X_t) - f(X_0) - int_0^t Lf ds - int_0^t grad f . gamma dxi, with the
/// reflection integral taken over the recorded pushes at their foot points.
/// Flags FAIL when any |z| > 4 or a function breaks the boundary sign.
MartingaleReport martingale_residual(const ModelSpec& model, const ControlPolicy& policy,
                                     const MartingaleTestSpec& spec, const McOptions& mc);

}  // namespace rsoc
