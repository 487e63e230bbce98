#include "dslad/verification/spline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "vec4/dsl_registry.gen.hpp"
#include "dslad/scalar/active_scalar.hpp"

namespace dslad::verification {

using simd::Float4;

void validate(const SplineConfig& config) {
  if (config.regions < 1) {
    throw std::invalid_argument("spline: at least one region per dimension");
  }
}

SplineGrid::SplineGrid(int regions)
    : regions_(regions),
      h_(2.0f / static_cast<float>(regions)),
      invh_(static_cast<float>(regions) / 2.0f),
      weights_(0.75f, -0.5f, 0.25f, 0.0f) {
  validate(SplineConfig{regions, 0, 0});
  const int m = regions + 3;
  nodes_.resize(static_cast<std::size_t>(m) * m);
  for (int ky = 0; ky < m; ++ky) {
    for (int kx = 0; kx < m; ++kx) {
      const double x = -1.0 + (kx - 1) * 2.0 / regions;
      const double y = -1.0 + (ky - 1) * 2.0 / regions;
      nodes_[kx + m * ky] = Float4(static_cast<float>(std::sin(2.0 * x) * std::cos(1.5 * y)),
                                   static_cast<float>(x * y + 0.5 * std::sin(3.0 * y)),
                                   static_cast<float>(std::exp(-0.5 * (x * x + y * y))), 0.0f);
    }
  }
}

int SplineGrid::region(float c) const {
  const int r = static_cast<int>(std::floor((c + 1.0f) * invh_));
  return std::clamp(r, 0, regions_ - 1);
}

std::vector<SplineSample> splineSamples(const SplineConfig& config) {
  std::mt19937_64 rng(config.seed);
  auto coordinate = [&] {
    // 24 random bits give every float in [0, 1) on a uniform lattice.
    const float unit = static_cast<float>(rng() >> 40) * 0x1p-24f;
    return 2.0f * unit - 1.0f;
  };
  std::vector<SplineSample> out(config.samples);
  for (auto& s : out) {
    s.x = coordinate();
    s.y = coordinate();
  }
  return out;
}

const char* splineModeName(SplineMode mode) { return mode == SplineMode::Scalar ? "scalar" : "vectorized"; }

namespace {

using Tape32 = Tape<float>;
using Float4Active = vec4::ActiveFloat4<float>;

ActiveFloat recordScalar(const SplineGrid& grid, const std::vector<SplineSample>& samples, std::vector<ActiveFloat>& xs,
                  std::vector<ActiveFloat>& ys, SplineResult& out) {
  const Float4& w = grid.weights();
  ActiveFloat objective = 0.0f;
  out.points.resize(3 * samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const int ix = grid.region(samples[s].x);
    const int iy = grid.region(samples[s].y);
    const ActiveFloat tx = (xs[s] - grid.origin(ix)) * grid.inverseSpacing();
    const ActiveFloat ty = (ys[s] - grid.origin(iy)) * grid.inverseSpacing();
    ActiveFloat p[3];
    for (int c = 0; c < 3; ++c) {
      ActiveFloat rows[4];
      for (int r = 0; r < 4; ++r) {
        rows[r] = catmullRom<ActiveFloat>(grid.node(ix, iy + r)[c], grid.node(ix + 1, iy + r)[c], grid.node(ix + 2, iy + r)[c],
                             grid.node(ix + 3, iy + r)[c], tx);
      }
      p[c] = catmullRom<ActiveFloat>(rows[0], rows[1], rows[2], rows[3], ty);
      out.points[3 * s + c] = p[c].getValue();
    }
    objective = objective + (p[0] * w[0] + p[1] * w[1] + p[2] * w[2]);
  }
  out.objective = objective.getValue();
  return objective;
}

ActiveFloat recordVectorized(const SplineGrid& grid, const std::vector<SplineSample>& samples,
                      std::vector<ActiveFloat>& xs, std::vector<ActiveFloat>& ys, SplineResult& out) {
  ActiveFloat objective = 0.0f;
  out.points.resize(3 * samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const int ix = grid.region(samples[s].x);
    const int iy = grid.region(samples[s].y);
    const ActiveFloat tx = (xs[s] - grid.origin(ix)) * grid.inverseSpacing();
    const ActiveFloat ty = (ys[s] - grid.origin(iy)) * grid.inverseSpacing();
    Float4Active rows[4];
    for (int r = 0; r < 4; ++r) {
      rows[r] = vec4::spline3(grid.node(ix, iy + r), grid.node(ix + 1, iy + r), grid.node(ix + 2, iy + r),
                              grid.node(ix + 3, iy + r), tx);
    }
    const Float4Active p = vec4::spline3(rows[0], rows[1], rows[2], rows[3], ty);
    for (int c = 0; c < 3; ++c) {
      out.points[3 * s + c] = p.getValue()[c];
    }
    objective = objective + vec4::dot(p, grid.weights());
  }
  out.objective = objective.getValue();
  return objective;
}

}  // namespace

SplineResult splineStudy(const SplineGrid& grid, const std::vector<SplineSample>& samples, SplineMode mode) {
  SplineResult out;
  {
    Tape32 tape;
    Tape32::Scope scope(tape);
    vec4::registerTypes(tape);
    std::vector<ActiveFloat> xs(samples.size());
    std::vector<ActiveFloat> ys(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
      xs[s] = samples[s].x;
      ys[s] = samples[s].y;
      xs[s].registerInput();
      ys[s].registerInput();
    }
    Stopwatch record;
    tape.setActive();
    ActiveFloat objective = mode == SplineMode::Scalar ? recordScalar(grid, samples, xs, ys, out)
                                                       : recordVectorized(grid, samples, xs, ys, out);
    tape.setPassive();
    out.report.recordSeconds = record.seconds();
    out.report.statements = tape.statementCount();
    out.report.memory = tape.memoryReport();

    Stopwatch reverse;
    objective.setGradient(1.0f);
    tape.evaluateReverse();
    out.report.reverseSeconds = reverse.seconds();
    out.gradient.resize(2 * samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
      out.gradient[2 * s] = xs[s].getGradient();
      out.gradient[2 * s + 1] = ys[s].getGradient();
    }
  }
  out.report.caseName = std::string("spline-") + splineModeName(mode);
  out.report.config = {{"regions", grid.regions()},
                       {"samples", samples.size()},
                       {"mode", splineModeName(mode)},
                       {"precision", "single"}};
  out.report.extra = {{"tapeBytes", out.report.memory.streamBytes()}, {"objective", out.objective}};
  return out;
}

double splineSampleObjective(const SplineGrid& grid, double x, double y) {
  const int ix = grid.region(static_cast<float>(x));
  const int iy = grid.region(static_cast<float>(y));
  const double h = 2.0 / grid.regions();
  const double tx = (x - (-1.0 + ix * h)) / h;
  const double ty = (y - (-1.0 + iy * h)) / h;
  double objective = 0.0;
  for (int c = 0; c < 3; ++c) {
    double rows[4];
    for (int r = 0; r < 4; ++r) {
      rows[r] = catmullRom<double, double, double>(grid.node(ix, iy + r)[c], grid.node(ix + 1, iy + r)[c],
                                           grid.node(ix + 2, iy + r)[c], grid.node(ix + 3, iy + r)[c], tx);
    }
    objective += grid.weights()[c] * catmullRom<double>(rows[0], rows[1], rows[2], rows[3], ty);
  }
  return objective;
}

GradCheck splineGradientCheck(const SplineGrid& grid, const std::vector<SplineSample>& samples,
                              const std::vector<float>& gradient, std::size_t count, double tolerance) {
  GradCheck out;
  out.tolerance = tolerance;
  for (std::size_t s = 0; s < std::min(count, samples.size()); ++s) {
    const std::vector<double> point{samples[s].x, samples[s].y};
    auto f = [&](const std::vector<double>& p) { return splineSampleObjective(grid, p[0], p[1]); };
    for (std::size_t k = 0; k < 2; ++k) {
      const double fd = centralPartial(f, point, k);
      out.maxRelErr = std::max(out.maxRelErr, relativeError(gradient[2 * s + k], fd));
      ++out.checked;
    }
  }
  out.pass = out.maxRelErr <= tolerance;
  return out;
}

namespace {

Float4 evaluate(const SplineGrid& grid, const SplineSample& s) {
  const int ix = grid.region(s.x);
  const int iy = grid.region(s.y);
  const float tx = (s.x - grid.origin(ix)) * grid.inverseSpacing();
  const float ty = (s.y - grid.origin(iy)) * grid.inverseSpacing();
  Float4 rows[4];
  for (int r = 0; r < 4; ++r) {
    rows[r] = vec4::spline3<float>(grid.node(ix, iy + r), grid.node(ix + 1, iy + r), grid.node(ix + 2, iy + r),
                                   grid.node(ix + 3, iy + r), tx);
  }
  return vec4::spline3<float>(rows[0], rows[1], rows[2], rows[3], ty);
}

}  // namespace

std::vector<Float4> splineBatchSerial(const SplineGrid& grid, const std::vector<SplineSample>& samples) {
  std::vector<Float4> out(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    out[s] = evaluate(grid, samples[s]);
  }
  return out;
}

std::vector<Float4> splineBatchParallel(const SplineGrid& grid, const std::vector<SplineSample>& samples) {
  std::vector<Float4> out(samples.size());
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    out[s] = evaluate(grid, samples[s]);
  }
  return out;
}

std::uint32_t ulpDistance(float a, float b) {
  auto ordered = [](float f) {
    const auto bits = std::bit_cast<std::int32_t>(f);
    return bits < 0 ? static_cast<std::int64_t>(std::numeric_limits<std::int32_t>::min()) - bits
                    : static_cast<std::int64_t>(bits);
  };
  const std::int64_t d = ordered(a) - ordered(b);
  return static_cast<std::uint32_t>(d < 0 ? -d : d);
}

}  // namespace dslad::verification
