// Serial reference vs OpenMP kernels: passive Burgers steps and batched spline evaluation.
#include <CLI11.hpp>

#include <cstdio>

#include <omp.h>

#include "dslad/verification/burgers.hpp"
#include "dslad/verification/spline.hpp"

using namespace dslad::verification;

int main(int argc, char** argv) {
  CLI::App app{"kernel_bench: serial vs OpenMP passive kernels"};
  int grid = 401;
  int steps = 32;
  std::size_t samples = 1000000;
  int repetitions = 5;
  app.add_option("--grid", grid, "Burgers grid points per dimension")->check(CLI::Range(3, 4001))->capture_default_str();
  app.add_option("--steps", steps, "Burgers time steps")->check(CLI::Range(1, 100000))->capture_default_str();
  app.add_option("--samples", samples, "spline samples")->check(CLI::Range(1, 100000000))->capture_default_str();
  app.add_option("--repetitions", repetitions, "best of n")->check(CLI::Range(1, 1000))->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::printf("threads %d\n", omp_get_max_threads());

  const BurgersConfig config{grid, steps, 100.0};
  const double dt = burgersTimeStep(config);
  double serial = 1e300, parallel = 1e300;
  bool same = true;
  for (int r = 0; r < repetitions; ++r) {
    auto a = burgersInitialState<double>(config);
    auto b = a;
    Stopwatch t1;
    for (int k = 0; k < steps; ++k) {
      burgersStep(config, a, k * dt, dt);
    }
    serial = std::min(serial, t1.seconds());
    Stopwatch t2;
    for (int k = 0; k < steps; ++k) {
      burgersStepParallel(config, b, k * dt, dt);
    }
    parallel = std::min(parallel, t2.seconds());
    same = same && a.u == b.u && a.v == b.v;
  }
  std::printf("burgers %dx%d, %d steps: serial %.4f s, openmp %.4f s, speedup %.2f, identical %s\n", grid, grid,
              steps, serial, parallel, serial / parallel, same ? "yes" : "NO");

  const SplineGrid splineGrid(16);
  const auto points = splineSamples(SplineConfig{16, samples, 2024});
  serial = parallel = 1e300;
  same = true;
  for (int r = 0; r < repetitions; ++r) {
    Stopwatch t1;
    const auto a = splineBatchSerial(splineGrid, points);
    serial = std::min(serial, t1.seconds());
    Stopwatch t2;
    const auto b = splineBatchParallel(splineGrid, points);
    parallel = std::min(parallel, t2.seconds());
    same = same && a == b;
  }
  std::printf("spline %zu samples: serial %.4f s, openmp %.4f s, speedup %.2f, identical %s\n", samples, serial,
              parallel, serial / parallel, same ? "yes" : "NO");
  return same ? 0 : 1;
}
