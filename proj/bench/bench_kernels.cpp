// Serial vs OpenMP timings of the two hot loops: the HJB march step and a
// batch of reflected paths.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "rsoc/config.hpp"
#include "rsoc/hjb_kernels.hpp"
#include "rsoc/reflected_sde.hpp"

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  const rsoc::RunConfig cfg = rsoc::parse_config(
      "[model]\ndim = 2\nbox_side = 6\nstep = 0.0625\nx0 = 1.5, 1.5\n", "bench");
  const rsoc::HjbOperator op(cfg.model);
  std::vector<double> w(op.grid().size(), 1.0), next(w.size());
  const double lambda = 0.5 / op.monotone_rate(0.0);
  const int steps = 200;
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("hjb step, %zu nodes x %d steps\n", w.size(), steps);
  for (auto exec : {rsoc::Exec::serial, rsoc::Exec::parallel}) {
    const double t = seconds([&] {
      for (int k = 0; k < steps; ++k) {
        op.step(w, next, lambda, 1e-4, exec);
        op.apply_boundary(next);
        std::swap(w, next);
      }
    });
    std::printf("  %-8s %.4f s\n", exec == rsoc::Exec::serial ? "serial" : "parallel", t);
  }

  const auto policy = rsoc::ControlPolicy::constant({0.5, 0.5});
  std::printf("path batch, 2000 paths x 1000 steps\n");
  for (auto exec : {rsoc::Exec::serial, rsoc::Exec::parallel}) {
    const double t = seconds([&] {
      const auto paths = rsoc::simulate_batch(cfg.model, policy, cfg.model.x0, 10.0, 0.01, 2000, 7, exec);
      (void)paths;
    });
    std::printf("  %-8s %.4f s\n", exec == rsoc::Exec::serial ? "serial" : "parallel", t);
  }
  return 0;
}
