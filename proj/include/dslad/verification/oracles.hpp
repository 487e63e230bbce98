#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace dslad::verification {

/// Central-difference step h = eps^(1/3) * max(1, |x|).
template <typename T>
T centralStep(T x) {
  return std::cbrt(std::numeric_limits<T>::epsilon()) * std::max(T(1), std::abs(x));
}

/// |ad - fd| / max(|fd|, 1).
inline double relativeError(double ad, double fd) { return std::abs(ad - fd) / std::max(std::abs(fd), 1.0); }

struct GradCheck {
  double maxRelErr = 0.0;
  double tolerance = 0.0;
  std::size_t checked = 0;
  bool pass = true;
};

/// Central-difference partial derivative of f with respect to component k.
inline double centralPartial(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                             std::size_t k) {
  const double x0 = x[k];
  const double h = centralStep(x0);
  x[k] = x0 + h;
  const double fp = f(x);
  x[k] = x0 - h;
  const double fm = f(x);
  // Use the actually representable step.
  return (fp - fm) / ((x0 + h) - (x0 - h));
}

/// Compares `gradient` against central differences of f at the given components.
inline GradCheck checkGradient(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& x, const std::vector<double>& gradient,
                               const std::vector<std::size_t>& components, double tolerance) {
  GradCheck out;
  out.tolerance = tolerance;
  for (std::size_t k : components) {
    const double fd = centralPartial(f, x, k);
    out.maxRelErr = std::max(out.maxRelErr, relativeError(gradient[k], fd));
    ++out.checked;
  }
  out.pass = out.maxRelErr <= tolerance;
  return out;
}

inline GradCheck checkGradient(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& x, const std::vector<double>& gradient, double tolerance) {
  std::vector<std::size_t> all(x.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = i;
  }
  return checkGradient(f, x, gradient, all, tolerance);
}

/// Directional derivative by the complex-step method: Im f(x + i h d) / h.
/// Exact to machine precision for real-analytic programs free of abs/comparisons on the imaginary part.
inline std::vector<double> complexStepTangent(
    const std::function<std::vector<std::complex<double>>(const std::vector<std::complex<double>>&)>& f,
    const std::vector<double>& x, const std::vector<double>& direction, double h = 1e-20) {
  std::vector<std::complex<double>> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = {x[i], h * direction[i]};
  }
  const auto y = f(z);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = y[i].imag() / h;
  }
  return out;
}

}  // namespace dslad::verification
