#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>

#include "dslad/expression.hpp"
#include "dslad/tape/tape.hpp"

namespace dslad {

/**
 * Active variable of a DSL type T on a tape with scalar type Real.
 *
 * ExprBase is the CRTP expression base of T (generated alongside the type),
 * so an ActiveObject takes part in the same overloads as the DSL operations.
 */
template <typename T, typename RealT, template <typename> class ExprBase>
class ActiveObject : public ExprBase<ActiveObject<T, RealT, ExprBase>> {
 public:
  using Real = RealT;
  using Value = T;
  using TapeType = Tape<Real>;
  using Traits = ActiveTypeTraits<T>;
  static constexpr bool kStoreByReference = true;

  ActiveObject() = default;
  ActiveObject(const T& value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  ActiveObject(T&& value) : value_(std::move(value)) {}  // NOLINT(google-explicit-constructor)

  template <typename E>
  ActiveObject(const ExprBase<E>& rhs) {  // NOLINT(google-explicit-constructor)
    assign(rhs.cast());
  }

  ActiveObject(const ActiveObject& other) { assign(other); }
  ActiveObject(ActiveObject&& other) noexcept
      : index_(std::exchange(other.index_, kPassiveIndex)), value_(std::move(other.value_)) {}

  ~ActiveObject() { release(); }

  ActiveObject& operator=(const ActiveObject& other) {
    if (this != &other || index_ != kPassiveIndex) {
      assign(other);
    }
    return *this;
  }

  ActiveObject& operator=(ActiveObject&& other) noexcept {
    if (this != &other) {
      release();
      index_ = std::exchange(other.index_, kPassiveIndex);
      value_ = std::move(other.value_);
    }
    return *this;
  }

  template <typename E>
  ActiveObject& operator=(const ExprBase<E>& rhs) {
    assign(rhs.cast());
    return *this;
  }

  ActiveObject& operator=(const T& value) {
    release();
    value_ = value;
    return *this;
  }

  // Expression protocol.

  const T& getValue() const { return value_; }
  std::size_t countActive() const { return index_ == kPassiveIndex ? 0 : 1; }

  template <typename Recorder>
  void record(Recorder& recorder) const {
    recorder.template pushActive<T>(index_, value_);
  }

  using Replay = ActiveLeafReplay<T, Real>;

  // Identifier and adjoint access.

  Index getIdentifier() const { return index_; }
  bool isActive() const { return index_ != kPassiveIndex; }

  void registerInput() { TapeType::current().registerInput(index_, value_); }

  /// Changes the primal value without recording a statement.
  void setValue(const T& value) {
    value_ = value;
    if (index_ != kPassiveIndex) {
      TapeType::current().template primalSlot<T>(index_) = value;
    }
  }

  /// Adjoint of this variable; a zero object of matching shape when passive or unset.
  T getAdjoint() const {
    if (index_ == kPassiveIndex) {
      return Traits::zeroLike(value_);
    }
    const T& adj = TapeType::current().template storage<T>().adjoint(index_);
    if (Traits::isUnset(adj)) {
      return Traits::zeroLike(value_);
    }
    return adj;
  }

  void setAdjoint(const T& adjoint) {
    if (index_ == kPassiveIndex) {
      throw std::invalid_argument("dslad: cannot set the adjoint of a passive value");
    }
    TapeType::current().template storage<T>().adjoint(index_) = adjoint;
  }

 private:
  template <typename E>
  void assign(const E& rhs) {
    T value = rhs.getValue();
    TapeType::current().store(index_, value, rhs);
    value_ = std::move(value);
  }

  void release() {
    if (index_ != kPassiveIndex) {
      TapeType::current().template releaseTyped<T>(index_);
      index_ = kPassiveIndex;
    }
  }

  Index index_ = kPassiveIndex;
  T value_{};
};

}  // namespace dslad
