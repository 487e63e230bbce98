#pragma once

#include <cstdint>
#include <vector>

#include "dslad/simd/float4.hpp"
#include "dslad/verification/report.hpp"

namespace dslad::verification {

/// Bicubic Catmull-Rom interpolation of 3D points over N x N regions of [-1, 1]^2.
struct SplineConfig {
  int regions = 16;
  std::size_t samples = 100000;
  std::uint64_t seed = 2024;
};

void validate(const SplineConfig& config);

/// Node values at (N + 3)^2 points, spacing h = 2 / N, including one ghost layer on each side.
/// Lanes 0..2 hold the point, lane 3 is zero.
class SplineGrid {
 public:
  explicit SplineGrid(int regions);

  int regions() const { return regions_; }
  float spacing() const { return h_; }
  float inverseSpacing() const { return invh_; }
  /// Node k covers coordinate -1 + (k - 1) h, k = 0 .. N + 2.
  const simd::Float4& node(int kx, int ky) const { return nodes_[kx + (regions_ + 3) * ky]; }
  /// Objective weights applied to the interpolated point.
  const simd::Float4& weights() const { return weights_; }

  /// Region of coordinate c and its origin.
  int region(float c) const;
  float origin(int region) const { return -1.0f + static_cast<float>(region) * h_; }

 private:
  int regions_;
  float h_;
  float invh_;
  std::vector<simd::Float4> nodes_;
  simd::Float4 weights_;
};

struct SplineSample {
  float x;
  float y;
};

/// Uniform samples on [-1, 1]^2 from a seeded 64-bit Mersenne twister.
std::vector<SplineSample> splineSamples(const SplineConfig& config);

/// Catmull-Rom segment through v1, v2 at t in [0, 1], written as in the vectorized operation.
template <typename R, typename V, typename X>
R catmullRom(const V& v0, const V& v1, const V& v2, const V& v3, const X& t) {
  const V dv = v2 - v1;
  const V z0 = 0.5f * (v2 - v0);
  const V z1 = 0.5f * (v3 - v1);
  return (t * t) * ((z1 - dv) * (t - 1.0f) + (z0 - dv) * (t - 2.0f)) + (z0 * t + v1);
}

enum class SplineMode { Scalar, Vectorized };

const char* splineModeName(SplineMode mode);

struct SplineResult {
  std::vector<float> points;    // 3 per sample
  std::vector<float> gradient;  // d objective / d (x, y), 2 per sample
  float objective = 0.0f;
  BenchReport report;
};

/**
 * Records interpolation of every sample plus the objective sum_s w . p_s on a fresh
 * single-precision tape and reverses it.
 *   Scalar:      one ActiveFloat statement per component and row, four per component for the column pass
 *   Vectorized:  one generated spline3 statement per row and one for the column pass, over Float4 packs
 */
SplineResult splineStudy(const SplineGrid& grid, const std::vector<SplineSample>& samples, SplineMode mode);

/// w . p(x, y) in double, for finite differences.
double splineSampleObjective(const SplineGrid& grid, double x, double y);

/// Central differences for the first `count` samples at `tolerance`.
GradCheck splineGradientCheck(const SplineGrid& grid, const std::vector<SplineSample>& samples,
                              const std::vector<float>& gradient, std::size_t count, double tolerance = 1e-3);

/// Passive vectorized evaluation; the parallel version splits samples over OpenMP threads.
std::vector<simd::Float4> splineBatchSerial(const SplineGrid& grid, const std::vector<SplineSample>& samples);
std::vector<simd::Float4> splineBatchParallel(const SplineGrid& grid, const std::vector<SplineSample>& samples);

/// Distance in units in the last place between two finite floats.
std::uint32_t ulpDistance(float a, float b);

}  // namespace dslad::verification
