#pragma once

#include <complex>
#include <cstddef>
#include <ostream>
#include <type_traits>
#include <utility>

#include "dslad/scalar/expressions.hpp"
#include "dslad/tape/tape.hpp"

namespace dslad {

/**
 * Active scalar bound to the current tape of its thread.
 *
 * Copies record a statement and get their own identifier, moves transfer the
 * identifier. The destructor returns the identifier to the tape.
 */
template <typename RealT>
class ActiveScalar : public ScalarExpression<ActiveScalar<RealT>> {
 public:
  using Real = RealT;
  using Value = Real;
  using TapeType = Tape<Real>;
  static constexpr bool kStoreByReference = true;

  ActiveScalar() = default;
  ActiveScalar(Real value) : value_(value) {}  // NOLINT(google-explicit-constructor)

  template <typename E>
  ActiveScalar(const ScalarExpression<E>& rhs) {  // NOLINT(google-explicit-constructor)
    assign(rhs.cast());
  }

  ActiveScalar(const ActiveScalar& other) { assign(other); }
  ActiveScalar(ActiveScalar&& other) noexcept
      : index_(std::exchange(other.index_, kPassiveIndex)), value_(other.value_) {}

  ~ActiveScalar() {
    if (index_ != kPassiveIndex) {
      TapeType::current().releaseIndex(index_);
    }
  }

  ActiveScalar& operator=(const ActiveScalar& other) {
    if (this != &other || index_ != kPassiveIndex) {
      assign(other);
    }
    return *this;
  }

  ActiveScalar& operator=(ActiveScalar&& other) noexcept {
    if (this != &other) {
      if (index_ != kPassiveIndex) {
        TapeType::current().releaseIndex(index_);
      }
      index_ = std::exchange(other.index_, kPassiveIndex);
      value_ = other.value_;
    }
    return *this;
  }

  template <typename E>
  ActiveScalar& operator=(const ScalarExpression<E>& rhs) {
    assign(rhs.cast());
    return *this;
  }

  ActiveScalar& operator=(Real value) {
    if (index_ != kPassiveIndex) {
      TapeType::current().releaseIndex(index_);
      index_ = kPassiveIndex;
    }
    value_ = value;
    return *this;
  }

  template <typename E>
  ActiveScalar& operator+=(const ScalarExpression<E>& rhs) {
    return *this = *this + rhs;
  }
  template <typename E>
  ActiveScalar& operator-=(const ScalarExpression<E>& rhs) {
    return *this = *this - rhs;
  }
  template <typename E>
  ActiveScalar& operator*=(const ScalarExpression<E>& rhs) {
    return *this = *this * rhs;
  }
  template <typename E>
  ActiveScalar& operator/=(const ScalarExpression<E>& rhs) {
    return *this = *this / rhs;
  }
  ActiveScalar& operator+=(Real c) { return *this = *this + c; }
  ActiveScalar& operator-=(Real c) { return *this = *this - c; }
  ActiveScalar& operator*=(Real c) { return *this = *this * c; }
  ActiveScalar& operator/=(Real c) { return *this = *this / c; }

  // Expression protocol.

  Real getValue() const { return value_; }
  std::size_t countActive() const { return index_ == kPassiveIndex ? 0 : 1; }

  template <typename Recorder>
  void record(Recorder& recorder) const {
    recorder.template pushActive<Real>(index_, value_);
  }

  using Replay = ActiveLeafReplay<Real, Real>;

  // Identifier and gradient access.

  Index getIdentifier() const { return index_; }
  bool isActive() const { return index_ != kPassiveIndex; }

  /// Marks the value as an independent of the current tape.
  void registerInput() { TapeType::current().registerInput(index_, value_); }

  /// Changes the primal value without recording a statement.
  void setValue(Real value) {
    value_ = value;
    if (index_ != kPassiveIndex) {
      TapeType::current().template primalSlot<Real>(index_) = value;
    }
  }

  Real getGradient() const { return TapeType::current().getGradient(index_); }
  void setGradient(Real g) { TapeType::current().setGradient(index_, g); }

 private:
  template <typename E>
  void assign(const E& rhs) {
    const Real value = rhs.getValue();
    TapeType::current().store(index_, value, rhs);
    value_ = value;
  }

  Index index_ = kPassiveIndex;
  Real value_ = Real(0);
};

using ActiveDouble = ActiveScalar<double>;
using ActiveFloat = ActiveScalar<float>;

template <typename Real>
ActiveScalar<Real> makeInput(Real value) {
  ActiveScalar<Real> x(value);
  x.registerInput();
  return x;
}

template <typename Real>
std::ostream& operator<<(std::ostream& os, const ActiveScalar<Real>& x) {
  return os << x.getValue();
}

/// Primal value of plain numbers, complex numbers and active scalars alike.
template <typename T>
  requires std::is_arithmetic_v<T>
T primalValue(T x) {
  return x;
}

template <typename T>
std::complex<T> primalValue(const std::complex<T>& x) {
  return x;
}

template <typename E>
auto primalValue(const ScalarExpression<E>& x) {
  return x.cast().getValue();
}

}  // namespace dslad
