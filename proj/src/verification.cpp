#include "rsoc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsoc/errors.hpp"
#include "rsoc/stats.hpp"

namespace rsoc {
namespace {

// Quintic step: 1 for s <= 0, 0 for s >= 1, C^2 in between.
struct Taper1 {
  double v, d1, d2;
};

Taper1 taper1(double x, double lo, double hi) {
  if (x <= lo) return {1.0, 0.0, 0.0};
  if (x >= hi) return {0.0, 0.0, 0.0};
  const double w = hi - lo;
  const double s = (x - lo) / w;
  const double s2 = s * s, s3 = s2 * s;
  const double p = 10.0 * s3 - 15.0 * s2 * s2 + 6.0 * s3 * s2;
  const double dp = 30.0 * s2 - 60.0 * s3 + 30.0 * s2 * s2;
  const double ddp = 60.0 * s - 180.0 * s2 + 120.0 * s3;
  return {1.0 - p, -dp / w, -ddp / (w * w)};
}

}  // namespace

TestFunction::TestFunction(TestFunctionKind kind, int dim, double box_side)
    : kind_(kind), dim_(dim), box_side_(box_side), center_(dim, box_side / 8.0) {}

std::string TestFunction::name() const {
  switch (kind_) {
    case TestFunctionKind::one:
      return "one";
    case TestFunctionKind::linear:
      return "linear";
    case TestFunctionKind::square:
      return "square";
    case TestFunctionKind::cosine:
      return "cosine";
    case TestFunctionKind::gaussian:
      break;
  }
  return "gaussian";
}

namespace {

struct Jet {
  double v = 0.0;
  Vec g;
  Mat h;
};

Jet base_jet(TestFunctionKind kind, int d, const Vec& x, const Vec& c) {
  Jet j{0.0, Vec(d), Mat(d)};
  switch (kind) {
    case TestFunctionKind::one:
      j.v = 1.0;
      break;
    case TestFunctionKind::linear:
      for (int i = 0; i < d; ++i) {
        j.v += x[i];
        j.g[i] = 1.0;
      }
      break;
    case TestFunctionKind::square:
      for (int i = 0; i < d; ++i) {
        j.v += x[i] * x[i];
        j.g[i] = 2.0 * x[i];
        j.h(i, i) = 2.0;
      }
      break;
    case TestFunctionKind::cosine:
      for (int i = 0; i < d; ++i) {
        j.v += std::cos(x[i]);
        j.g[i] = -std::sin(x[i]);
        j.h(i, i) = -std::cos(x[i]);
      }
      break;
    case TestFunctionKind::gaussian: {
      const Vec y = x - c;
      const double e = std::exp(-dot(y, y));
      j.v = e;
      for (int i = 0; i < d; ++i) {
        j.g[i] = -2.0 * y[i] * e;
        for (int k = 0; k < d; ++k) j.h(i, k) = (4.0 * y[i] * y[k] - (i == k ? 2.0 : 0.0)) * e;
      }
      break;
    }
  }
  return j;
}

Jet full_jet(TestFunctionKind kind, int d, double L, const Vec& x, const Vec& c) {
  const Jet b = base_jet(kind, d, x, c);
  std::array<Taper1, kMaxDim> t{};
  for (int i = 0; i < d; ++i) t[i] = taper1(x[i], 0.6 * L, 0.9 * L);
  // T = prod t_i, with partials.
  double T = 1.0;
  for (int i = 0; i < d; ++i) T *= t[i].v;
  Vec dT(d);
  Mat ddT(d);
  for (int i = 0; i < d; ++i) {
    double p = t[i].d1;
    for (int k = 0; k < d; ++k)
      if (k != i) p *= t[k].v;
    dT[i] = p;
    for (int m = 0; m < d; ++m) {
      double q = 1.0;
      for (int k = 0; k < d; ++k) {
        if (m == i) {
          q *= k == i ? t[k].d2 : t[k].v;
        } else {
          q *= k == i ? t[k].d1 : (k == m ? t[k].d1 : t[k].v);
        }
      }
      ddT(i, m) = q;
    }
  }
  Jet j{b.v * T, Vec(d), Mat(d)};
  for (int i = 0; i < d; ++i) {
    j.g[i] = b.g[i] * T + b.v * dT[i];
    for (int m = 0; m < d; ++m)
      j.h(i, m) = b.h(i, m) * T + b.g[i] * dT[m] + b.g[m] * dT[i] + b.v * ddT(i, m);
  }
  return j;
}

}  // namespace

double TestFunction::value(const Vec& x) const noexcept { return full_jet(kind_, dim_, box_side_, x, center_).v; }
Vec TestFunction::gradient(const Vec& x) const noexcept { return full_jet(kind_, dim_, box_side_, x, center_).g; }
Mat TestFunction::hessian(const Vec& x) const noexcept { return full_jet(kind_, dim_, box_side_, x, center_).h; }

std::vector<TestFunction> test_function_catalog(int dim, double box_side) {
  std::vector<TestFunction> out;
  for (TestFunctionKind k : {TestFunctionKind::one, TestFunctionKind::linear, TestFunctionKind::square,
                             TestFunctionKind::cosine, TestFunctionKind::gaussian})
    out.emplace_back(k, dim, box_side);
  return out;
}

double apply_generator(const CoefficientField& coeffs, const TestFunction& f, const Vec& x,
                       std::span<const double> weights) {
  require_in_orthant(x);
  const Vec b = mix_drift(coeffs, x, weights);
  const Vec g = f.gradient(x);
  const Mat h = f.hessian(x);
  const Mat& a = coeffs.diffusion(x);
  double tr = 0.0;
  for (int i = 0; i < coeffs.dim(); ++i)
    for (int k = 0; k < coeffs.dim(); ++k) tr += a(i, k) * h(k, i);
  return dot(b, g) + 0.5 * tr;
}

double boundary_sign_margin(const CoefficientField& coeffs, const TestFunction& f, const Grid& grid) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec x = grid.coord(p);
    for (int i = 0; i < grid.dim(); ++i)
      if (grid.on_inner_face(p, i)) m = std::min(m, dot(f.gradient(x), coeffs.gamma(x, i)));
  }
  return m;
}

namespace {

struct MartingaleObserver {
  const CoefficientField& coeffs;
  const std::vector<TestFunction>& fs;
  const std::vector<int>& marks;
  std::span<double> m_out;  // functions x marks
  std::span<double> x_out;  // marks x dim, state at each mark
  std::vector<double> m;
  std::size_t next = 0;
  double f0 = 0.0;

  void start(const Vec& x) {
    m.assign(fs.size(), 0.0);
    for (std::size_t k = 0; k < fs.size(); ++k) m[k] = -fs[k].value(x);
    record(0, x);
  }
  void record(int n, const Vec& x) {
    while (next < marks.size() && marks[next] == n) {
      for (std::size_t k = 0; k < fs.size(); ++k) m_out[k * marks.size() + next] = m[k] + fs[k].value(x);
      for (int i = 0; i < x.size(); ++i) x_out[next * static_cast<std::size_t>(x.size()) + static_cast<std::size_t>(i)] = x[i];
      ++next;
    }
  }
  bool step(const StepView& v) {
    for (std::size_t k = 0; k < fs.size(); ++k) {
      double inc = apply_generator(coeffs, fs[k], v.x, v.weights) * v.dt;
      for (const Push& p : v.pushes) inc += dot(fs[k].gradient(p.foot), p.gamma) * p.amount;
      m[k] -= inc;
    }
    record(v.n + 1, v.x_next);
    return next < marks.size();
  }
};

double zscore(double mean, double se) {
  if (se > 0.0) return mean / se;
  return mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

MartingaleReport martingale_residual(const ModelSpec& model, const ControlPolicy& policy,
                                     const MartingaleTestSpec& spec, const McOptions& mc) {
  if (mc.n_paths < 2) throw ValidationError("n_paths must be >= 2");
  if (spec.checkpoints.empty()) throw ValidationError("at least one checkpoint is required");
  require_in_orthant(spec.start);
  std::vector<int> marks{0};
  for (double t : spec.checkpoints) {
    const int n = step_count(t, mc.dt);
    if (n <= marks.back()) throw ValidationError("checkpoints must be increasing and at least dt apart");
    marks.push_back(n);
  }
  const std::size_t nf = spec.functions.size();
  const std::size_t nm = marks.size();
  const int d = model.domain.dim;
  std::vector<double> mvals(mc.n_paths * nf * nm);
  std::vector<double> xvals(mc.n_paths * nm * static_cast<std::size_t>(d));
  for_each_path(mc.n_paths, mc.exec, [&](std::size_t i) {
    MartingaleObserver obs{model.coeffs, spec.functions, marks,
                           std::span<double>(mvals.data() + i * nf * nm, nf * nm),
                           std::span<double>(xvals.data() + i * nm * static_cast<std::size_t>(d), nm * static_cast<std::size_t>(d)),
                           {}, 0, 0.0};
    run_path(model, policy, {spec.start, marks.back() * mc.dt, mc.dt, split_seed(mc.base_seed, i)}, obs);
  });

  MartingaleReport rep;
  const Grid grid = model.grid();
  std::vector<double> inc(mc.n_paths), xs(mc.n_paths);
  for (std::size_t k = 0; k < nf; ++k) {
    FunctionResidual fr;
    fr.name = spec.functions[k].name();
    fr.boundary_margin = boundary_sign_margin(model.coeffs, spec.functions[k], grid);
    fr.boundary_ok = fr.boundary_margin >= -1e-12;
    for (std::size_t j = 1; j < nm; ++j) {
      IncrementStat st;
      st.s = marks[j - 1] * mc.dt;
      st.t = marks[j] * mc.dt;
      for (std::size_t i = 0; i < mc.n_paths; ++i) {
        const double* mrow = mvals.data() + i * nf * nm + k * nm;
        inc[i] = mrow[j] - mrow[j - 1];
      }
      const stats::MeanSe ms = stats::mean_se(inc);
      st.mean = ms.mean;
      st.std_error = ms.std_error;
      st.z = zscore(ms.mean, ms.std_error);
      for (int c = 0; c < d; ++c) {
        for (std::size_t i = 0; i < mc.n_paths; ++i)
          xs[i] = xvals[i * nm * static_cast<std::size_t>(d) + (j - 1) * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        if (*lo == *hi) continue;
        const stats::Regression reg = stats::linear_regression(xs, inc);
        st.slope_z = std::max(st.slope_z, std::abs(zscore(reg.slope, reg.slope_se)));
      }
      fr.max_z = std::max({fr.max_z, std::abs(st.z), st.slope_z});
      fr.increments.push_back(st);
    }
    fr.pass = fr.boundary_ok && fr.max_z <= 4.0;
    rep.max_z = std::max(rep.max_z, fr.max_z);
    rep.functions.push_back(std::move(fr));
  }
  rep.pass = std::all_of(rep.functions.begin(), rep.functions.end(), [](const FunctionResidual& f) { return f.pass; });
  return rep;
}

}  // namespace rsoc
