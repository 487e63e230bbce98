#include "dslad/verification/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dslad::verification {

Velocity burgersExact(double x, double y, double t) {
  const double d = 1.0 - 2.0 * t * t;
  if (std::abs(d) < 1e-12) {
    throw std::domain_error("burgersExact: 1 - 2t^2 vanishes");
  }
  return {(x + y - 2.0 * x * t) / d, (x - y - 2.0 * y * t) / d};
}

void validate(const BurgersConfig& config) {
  if (config.gridPoints < 3) {
    throw std::invalid_argument("burgers: at least 3 grid points per dimension");
  }
  if (config.timeSteps < 0) {
    throw std::invalid_argument("burgers: negative step count");
  }
  if (!(config.reynolds > 0.0)) {
    throw std::invalid_argument("burgers: Reynolds number must be positive");
  }
}

double burgersSpacing(const BurgersConfig& config) { return 1.0 / (config.gridPoints - 1); }

namespace {

double maxInitialSpeed(int n) {
  const double h = 1.0 / (n - 1);
  double speed = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Velocity e = burgersExact(i * h, j * h, 0.0);
      speed = std::max(speed, std::abs(e.u) + std::abs(e.v));
    }
  }
  return speed;
}

}  // namespace

double burgersTimeStep(const BurgersConfig& config) {
  const double h = burgersSpacing(config);
  const double convective = 0.4 * h / maxInitialSpeed(config.gridPoints);
  const double diffusive = 0.2 * config.reynolds * h * h;
  return std::min(convective, diffusive);
}

double burgersCourant(const BurgersConfig& config) {
  return burgersTimeStep(config) * maxInitialSpeed(config.gridPoints) / burgersSpacing(config);
}

double burgersDiffusionNumber(const BurgersConfig& config) {
  const double h = burgersSpacing(config);
  return burgersTimeStep(config) / (config.reynolds * h * h);
}

void burgersStepParallel(const BurgersConfig& config, BurgersState<double>& s, double t, double dt) {
  const int n = s.n;
  const double h = burgersSpacing(config);
  const double invh = 1.0 / h;
  const double diff = dt / (config.reynolds * h * h);
  const double* u = s.u.data();
  const double* v = s.v.data();
  double* un = s.uNext.data();
  double* vn = s.vNext.data();
#pragma omp parallel for schedule(static)
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      const int k = i + n * j;
      const bool xUp = u[k] >= 0.0;
      const bool yUp = v[k] >= 0.0;
      const int x0 = xUp ? k - 1 : k;
      const int x1 = xUp ? k : k + 1;
      const int y0 = yUp ? k - n : k;
      const int y1 = yUp ? k : k + n;
      un[k] = u[k] - dt * (u[k] * ((u[x1] - u[x0]) * invh) + v[k] * ((u[y1] - u[y0]) * invh)) +
              diff * (u[k + 1] + u[k - 1] + u[k + n] + u[k - n] - 4.0 * u[k]);
      vn[k] = v[k] - dt * (u[k] * ((v[x1] - v[x0]) * invh) + v[k] * ((v[y1] - v[y0]) * invh)) +
              diff * (v[k + 1] + v[k - 1] + v[k + n] + v[k - n] - 4.0 * v[k]);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
        const Velocity e = burgersExact(i * h, j * h, t + dt);
        un[i + n * j] = e.u;
        vn[i + n * j] = e.v;
      }
    }
  }
  std::swap(s.u, s.uNext);
  std::swap(s.v, s.vNext);
}

std::vector<int> burgersInterior(int n) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n - 2) * (n - 2));
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      out.push_back(i + n * j);
    }
  }
  return out;
}

std::vector<double> burgersInitialInterior(const BurgersConfig& config) {
  const auto s = burgersInitialState<double>(config);
  std::vector<double> out;
  for (int k : burgersInterior(s.n)) {
    out.push_back(s.u[k]);
  }
  return out;
}

BurgersGradient burgersGradient(const BurgersConfig& config) {
  validate(config);
  const auto interior = burgersInterior(config.gridPoints);
  const std::size_t m = interior.size();

  Tape<double> tape;
  Tape<double>::Scope scope(tape);
  BurgersGradient out;
  std::vector<Index> inputIds(m);
  {
    Stopwatch record;
    auto s = burgersInitialState<ActiveDouble>(config);
    for (std::size_t k = 0; k < m; ++k) {
      s.u[interior[k]].registerInput();
      inputIds[k] = s.u[interior[k]].getIdentifier();
    }
    tape.setActive();
    burgersAdvance(config, s);
    ActiveDouble objective = burgersInteriorSum(s);
    tape.setPassive();
    out.report.recordSeconds = record.seconds();
    out.report.statements = tape.statementCount();
    out.report.memory = tape.memoryReport();
    out.objective = objective.getValue();

    Stopwatch reverse;
    objective.setGradient(1.0);
    tape.evaluateReverse();
    out.report.reverseSeconds = reverse.seconds();
    out.gradient.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      out.gradient[k] = tape.getGradient(inputIds[k]);
    }
  }
  tape.reset();

  out.expectedStatements = m * (2 * static_cast<std::size_t>(config.timeSteps) + 1);
  out.report.caseName = "burgers";
  out.report.config = {{"gridPoints", config.gridPoints},
                       {"timeSteps", config.timeSteps},
                       {"reynolds", config.reynolds},
                       {"dt", burgersTimeStep(config)},
                       {"precision", "double"}};
  out.report.extra = {{"objective", out.objective},
                      {"expectedStatements", out.expectedStatements},
                      {"courant", burgersCourant(config)},
                      {"diffusionNumber", burgersDiffusionNumber(config)},
                      {"cflViolation", burgersCourant(config) > 1.0 || burgersDiffusionNumber(config) > 0.25}};
  return out;
}

GradCheck burgersGradientCheck(const BurgersConfig& config, const std::vector<double>& gradient, int samples,
                               std::uint64_t seed, double tolerance) {
  const auto start = burgersInitialInterior(config);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> all(start.size());
  for (std::size_t k = 0; k < all.size(); ++k) {
    all[k] = k;
  }
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(samples)));
  std::sort(all.begin(), all.end());
  auto f = [&](const std::vector<double>& x) { return burgersObjective(config, x); };
  return checkGradient(f, start, gradient, all, tolerance);
}

double burgersDotProductError(const BurgersConfig& config, const std::vector<double>& gradient, std::uint64_t seed) {
  const auto start = burgersInitialInterior(config);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> direction(start.size());
  for (auto& d : direction) {
    d = dist(rng);
  }
  using C = std::complex<double>;
  auto f = [&](const std::vector<C>& x) { return std::vector<C>{burgersObjective(config, x)}; };
  const double tangent = complexStepTangent(f, start, direction)[0];
  double adjoint = 0.0;
  for (std::size_t k = 0; k < start.size(); ++k) {
    adjoint += gradient[k] * direction[k];
  }
  return std::abs(tangent - adjoint) / std::abs(adjoint);
}

std::vector<ConvergenceRow> burgersSelfConvergence(const std::vector<int>& grids, double finalTime, double reynolds) {
  std::vector<ConvergenceRow> rows;
  for (int n : grids) {
    BurgersConfig config{n, 0, reynolds};
    const double dtTarget = burgersTimeStep(config);
    config.timeSteps = static_cast<int>(std::ceil(finalTime / dtTarget - 1e-9));
    const double dt = finalTime / config.timeSteps;
    auto s = burgersInitialState<double>(config);
    for (int step = 0; step < config.timeSteps; ++step) {
      burgersStep(config, s, step * dt, dt);
    }
    const double h = burgersSpacing(config);
    ConvergenceRow row{n, config.timeSteps, 0.0, 0.0};
    const auto interior = burgersInterior(n);
    for (int k : interior) {
      const double err = std::abs(s.u[k] - burgersExact((k % n) * h, (k / n) * h, finalTime).u);
      row.maxError = std::max(row.maxError, err);
      row.rmsError += err * err;
    }
    row.rmsError = std::sqrt(row.rmsError / interior.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dslad::verification
