#pragma once

#include <cstdint>
#include <cstring>

#include <Eigen/Dense>

#include "dslad/dsl/type_traits.hpp"

namespace dslad {

/// Dynamic Eigen matrices and vectors: rows, cols, then column-major data.
template <typename M>
struct EigenDynamicTraits {
  using Scalar = typename M::Scalar;
  static constexpr std::size_t alignment = alignof(M);
  static constexpr std::size_t fixedEncodedSize = 0;

  static std::size_t encodedSize(const M& m) {
    return 2 * sizeof(std::int64_t) + static_cast<std::size_t>(m.size()) * sizeof(Scalar);
  }
  static void encode(std::byte* out, const M& m) {
    const std::int64_t shape[2] = {m.rows(), m.cols()};
    std::memcpy(out, shape, sizeof(shape));
    if (m.size() > 0) {
      std::memcpy(out + sizeof(shape), m.data(), static_cast<std::size_t>(m.size()) * sizeof(Scalar));
    }
  }
  static M decode(const std::byte* in, std::size_t size) {
    std::int64_t shape[2];
    std::memcpy(shape, in, sizeof(shape));
    if (shape[0] < 0 || shape[1] < 0 ||
        sizeof(shape) + static_cast<std::size_t>(shape[0] * shape[1]) * sizeof(Scalar) != size) {
      throw TapeCorrupted("dslad: malformed Eigen object on the tape");
    }
    M m(shape[0], shape[1]);
    if (m.size() > 0) {
      std::memcpy(m.data(), in + sizeof(shape), static_cast<std::size_t>(m.size()) * sizeof(Scalar));
    }
    return m;
  }
  static M zeroLike(const M& primal) { return M::Zero(primal.rows(), primal.cols()); }
  static bool isUnset(const M& adjoint) { return adjoint.size() == 0; }
  static bool isZero(const M& adjoint) { return adjoint.size() == 0 || adjoint.isZero(0); }
  static void accumulate(M& adjoint, const M& x) {
    if (adjoint.size() == 0) {
      adjoint = x;
    } else {
      adjoint += x;
    }
  }
  static void clear(M& adjoint) { adjoint.resize(0, 0); }
  static std::size_t payloadBytes(const M& m) { return static_cast<std::size_t>(m.size()) * sizeof(Scalar); }
};

template <>
struct ActiveTypeTraits<Eigen::MatrixXd> : EigenDynamicTraits<Eigen::MatrixXd> {
  static constexpr const char* name = "MatrixXd";
};

template <>
struct ActiveTypeTraits<Eigen::VectorXd> : EigenDynamicTraits<Eigen::VectorXd> {
  static constexpr const char* name = "VectorXd";
};

}  // namespace dslad
