#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "dslad/scalar/active_scalar.hpp"
#include "dslad/verification/report.hpp"

namespace dslad::verification {

/// Coupled 2D Burgers equations on the unit square, explicit upwind scheme.
struct BurgersConfig {
  int gridPoints = 21;
  int timeSteps = 8;
  double reynolds = 100.0;
};

struct Velocity {
  double u;
  double v;
};

/// Closed-form solution. Throws std::domain_error where 1 - 2t^2 vanishes.
Velocity burgersExact(double x, double y, double t);

/// Grid spacing and the time step: dt = 0.4 h / max(|u| + |v|) at t = 0, capped at 0.2 R h^2
/// where the explicit diffusion term would otherwise be unstable (finer than 101^2 at R = 100).
double burgersSpacing(const BurgersConfig& config);
double burgersTimeStep(const BurgersConfig& config);
/// dt * max(|u| + |v|) / h of the initial field.
double burgersCourant(const BurgersConfig& config);
/// dt / (R h^2); the explicit scheme needs at most 0.25.
double burgersDiffusionNumber(const BurgersConfig& config);

void validate(const BurgersConfig& config);

/// Row-major n x n fields, index i + n * j with x = i h and y = j h.
template <typename T>
struct BurgersState {
  int n = 0;
  std::vector<T> u, v;
  std::vector<T> uNext, vNext;
};

inline double realValue(double x) { return x; }
inline double realValue(const std::complex<double>& x) { return x.real(); }
template <typename Real>
Real realValue(const ActiveScalar<Real>& x) {
  return x.getValue();
}

/// Exact field at t = 0 on every node.
template <typename T>
BurgersState<T> burgersInitialState(const BurgersConfig& config) {
  validate(config);
  const int n = config.gridPoints;
  const double h = burgersSpacing(config);
  BurgersState<T> s;
  s.n = n;
  s.u.resize(static_cast<std::size_t>(n) * n);
  s.v.resize(s.u.size());
  s.uNext.resize(s.u.size());
  s.vNext.resize(s.u.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Velocity e = burgersExact(i * h, j * h, 0.0);
      s.u[i + n * j] = e.u;
      s.v[i + n * j] = e.v;
    }
  }
  return s;
}

/// Advances from t to t + dt; the boundary is set from the exact solution at t + dt.
/// Every interior update of u and v is one assignment.
template <typename T>
void burgersStep(const BurgersConfig& config, BurgersState<T>& s, double t, double dt) {
  const int n = s.n;
  const double h = burgersSpacing(config);
  const double invh = 1.0 / h;
  const double diff = dt / (config.reynolds * h * h);
  const auto& u = s.u;
  const auto& v = s.v;
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      const int k = i + n * j;
      const bool xUp = realValue(u[k]) >= 0.0;
      const bool yUp = realValue(v[k]) >= 0.0;
      const int x0 = xUp ? k - 1 : k;
      const int x1 = xUp ? k : k + 1;
      const int y0 = yUp ? k - n : k;
      const int y1 = yUp ? k : k + n;
      s.uNext[k] = u[k] - dt * (u[k] * ((u[x1] - u[x0]) * invh) + v[k] * ((u[y1] - u[y0]) * invh)) +
                   diff * (u[k + 1] + u[k - 1] + u[k + n] + u[k - n] - 4.0 * u[k]);
      s.vNext[k] = v[k] - dt * (u[k] * ((v[x1] - v[x0]) * invh) + v[k] * ((v[y1] - v[y0]) * invh)) +
                   diff * (v[k + 1] + v[k - 1] + v[k + n] + v[k - n] - 4.0 * v[k]);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
        const Velocity e = burgersExact(i * h, j * h, t + dt);
        s.uNext[i + n * j] = e.u;
        s.vNext[i + n * j] = e.v;
      }
    }
  }
  std::swap(s.u, s.uNext);
  std::swap(s.v, s.vNext);
}

/// Same update as burgersStep<double>, rows distributed over OpenMP threads.
void burgersStepParallel(const BurgersConfig& config, BurgersState<double>& s, double t, double dt);

/// Interior node indices in the order used for inputs and gradients.
std::vector<int> burgersInterior(int n);

/// Runs config.timeSteps steps of size burgersTimeStep(config) starting at t = 0.
template <typename T>
void burgersAdvance(const BurgersConfig& config, BurgersState<T>& s) {
  const double dt = burgersTimeStep(config);
  for (int step = 0; step < config.timeSteps; ++step) {
    burgersStep(config, s, step * dt, dt);
  }
}

/// Sum of the interior u, one assignment per node.
template <typename T>
T burgersInteriorSum(const BurgersState<T>& s) {
  T sum = 0.0;
  for (int k : burgersInterior(s.n)) {
    sum += s.u[k];
  }
  return sum;
}

/// Objective for a passive scalar type: exact initial field with the interior of u replaced by `initialU`.
template <typename T>
T burgersObjective(const BurgersConfig& config, const std::vector<T>& initialU) {
  auto s = burgersInitialState<T>(config);
  const auto interior = burgersInterior(s.n);
  for (std::size_t m = 0; m < interior.size(); ++m) {
    s.u[interior[m]] = initialU[m];
  }
  burgersAdvance(config, s);
  return burgersInteriorSum(s);
}

/// Exact interior u at t = 0.
std::vector<double> burgersInitialInterior(const BurgersConfig& config);

struct BurgersGradient {
  std::vector<double> gradient;  // d objective / d initial interior u
  double objective = 0.0;
  BenchReport report;
  /// 2 (n-2)^2 per step plus (n-2)^2 for the objective sum.
  std::size_t expectedStatements = 0;
};

/// Records the whole time loop on a fresh tape, seeds the objective with 1 and reverses.
BurgersGradient burgersGradient(const BurgersConfig& config);

/// Central differences at `samples` random interior nodes, relative tolerance `tolerance`.
GradCheck burgersGradientCheck(const BurgersConfig& config, const std::vector<double>& gradient, int samples,
                               std::uint64_t seed, double tolerance = 1e-6);

/// |<1, J xdot> - <xbar, xdot>| / |<xbar, xdot>| for a random direction; J xdot by complex step.
double burgersDotProductError(const BurgersConfig& config, const std::vector<double>& gradient, std::uint64_t seed);

struct ConvergenceRow {
  int gridPoints = 0;
  int timeSteps = 0;
  double maxError = 0.0;
  double rmsError = 0.0;
};

/// Error of the final u against the exact solution at time `finalTime` for each grid.
std::vector<ConvergenceRow> burgersSelfConvergence(const std::vector<int>& grids, double finalTime, double reynolds);

}  // namespace dslad::verification
