#pragma once

#include <cstddef>
#include <type_traits>

#include "dslad/dsl/type_traits.hpp"
#include "dslad/tape/chunked_stream.hpp"
#include "dslad/tape/index_manager.hpp"

// Expression protocol shared by scalar and DSL nodes. A node type E provides
//
//   using Value;                         primal value type of the node
//   static constexpr bool kStoreByReference;
//   getValue() const;                    primal value, computed at construction
//   std::size_t countActive() const;     leaves with a nonzero identifier
//   template <class R> void record(R&) const;
//                                        pushes leaves left to right
//   struct Replay {                      reverse-time reconstruction
//     template <class C> explicit Replay(C&);   pops leaves right to left
//     Value value;
//     template <class C> void backward(const Value& bar, C&);
//   };
//
// Active nodes also carry `using Real` for the tape precision.

namespace dslad {

/// Named variables are held by reference, temporaries by value.
template <typename E>
using StoreAs = std::conditional_t<E::kStoreByReference, const E&, const E>;

/// Passive operand of an expression; its value goes to the constant stream.
template <typename T>
struct Constant {
  using Value = T;
  static constexpr bool kStoreByReference = false;

  T value;

  explicit Constant(const T& v) : value(v) {}

  const T& getValue() const { return value; }
  std::size_t countActive() const { return 0; }

  template <typename Recorder>
  void record(Recorder& recorder) const {
    recorder.pushConstant(value);
  }

  struct Replay {
    T value;

    template <typename Context>
    explicit Replay(Context& context) : value(context.template popConstant<T>()) {}

    template <typename Context>
    void backward(const T&, Context&) {}
  };
};

/// Reverse-time view of an active leaf.
template <typename T, typename Real>
struct ActiveLeafReplay {
  Index index = kPassiveIndex;
  T value{};

  template <typename Context>
  explicit ActiveLeafReplay(Context& context) {
    const TaggedIndex argument = context.popArgument();
    if (argument.tag() != context.template tagOf<T>()) {
      throw TapeCorrupted("dslad: rhs identifier has an unexpected type tag");
    }
    index = argument.index();
    if (index == kPassiveIndex) {
      value = context.template popConstant<T>();
    } else if constexpr (std::is_same_v<T, Real>) {
      value = context.primal(index);
    } else {
      value = context.template storage<T>().primal(index);
    }
  }

  template <typename Context>
  void backward(const T& bar, Context& context) {
    if (index == kPassiveIndex) {
      return;
    }
    if constexpr (std::is_same_v<T, Real>) {
      context.adjoint(index) += bar;
    } else {
      ActiveTypeTraits<T>::accumulate(context.template storage<T>().adjoint(index), bar);
    }
  }
};

}  // namespace dslad
