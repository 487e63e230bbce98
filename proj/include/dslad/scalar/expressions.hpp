#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>

#include "dslad/expression.hpp"

namespace dslad {

/// CRTP base of every expression whose value is the tape scalar.
template <typename Derived>
struct ScalarExpression {
  const Derived& cast() const { return static_cast<const Derived&>(*this); }
};

template <typename E>
concept ScalarExpr = std::is_base_of_v<ScalarExpression<E>, E>;

namespace ops {

// Each op provides the primal and the partial derivatives given operands and result.

template <typename Real>
struct Add {
  static Real primal(Real a, Real b) { return a + b; }
  static Real da(Real, Real, Real) { return Real(1); }
  static Real db(Real, Real, Real) { return Real(1); }
};

template <typename Real>
struct Sub {
  static Real primal(Real a, Real b) { return a - b; }
  static Real da(Real, Real, Real) { return Real(1); }
  static Real db(Real, Real, Real) { return Real(-1); }
};

template <typename Real>
struct Mul {
  static Real primal(Real a, Real b) { return a * b; }
  static Real da(Real, Real b, Real) { return b; }
  static Real db(Real a, Real, Real) { return a; }
};

template <typename Real>
struct Div {
  static Real primal(Real a, Real b) { return a / b; }
  static Real da(Real, Real b, Real) { return Real(1) / b; }
  static Real db(Real, Real b, Real r) { return -r / b; }
};

/// Power with a passive exponent.
template <typename Real>
struct Pow {
  static Real primal(Real a, Real b) { return std::pow(a, b); }
  static Real da(Real a, Real b, Real) {
    if (b == Real(0)) {
      return Real(0);
    }
    return b * std::pow(a, b - Real(1));
  }
  static Real db(Real, Real, Real) { return Real(0); }
};

template <typename Real>
struct Neg {
  static Real primal(Real a) { return -a; }
  static Real da(Real, Real) { return Real(-1); }
};

template <typename Real>
struct Sin {
  static Real primal(Real a) { return std::sin(a); }
  static Real da(Real a, Real) { return std::cos(a); }
};

template <typename Real>
struct Cos {
  static Real primal(Real a) { return std::cos(a); }
  static Real da(Real a, Real) { return -std::sin(a); }
};

template <typename Real>
struct Exp {
  static Real primal(Real a) { return std::exp(a); }
  static Real da(Real, Real r) { return r; }
};

template <typename Real>
struct Log {
  static Real primal(Real a) { return std::log(a); }
  static Real da(Real a, Real) { return Real(1) / a; }
};

template <typename Real>
struct Sqrt {
  static Real primal(Real a) { return std::sqrt(a); }
  static Real da(Real, Real r) { return Real(0.5) / r; }
};

template <typename Real>
struct Square {
  static Real primal(Real a) { return a * a; }
  static Real da(Real a, Real) { return Real(2) * a; }
};

}  // namespace ops

template <typename Op, typename A>
struct UnaryNode : ScalarExpression<UnaryNode<Op, A>> {
  using Real = typename A::Real;
  using Value = Real;
  static constexpr bool kStoreByReference = false;

  StoreAs<A> a;
  Real value;

  explicit UnaryNode(const A& a_) : a(a_), value(Op::primal(a.getValue())) {}

  Real getValue() const { return value; }
  std::size_t countActive() const { return a.countActive(); }

  template <typename Recorder>
  void record(Recorder& recorder) const {
    a.record(recorder);
  }

  struct Replay {
    typename A::Replay a;
    Real value;

    template <typename Context>
    explicit Replay(Context& context) : a(context), value(Op::primal(a.value)) {}

    template <typename Context>
    void backward(Real bar, Context& context) {
      a.backward(Op::da(a.value, value) * bar, context);
    }
  };
};

template <typename Op, typename A, typename B>
struct BinaryNode : ScalarExpression<BinaryNode<Op, A, B>> {
  using Real = typename std::conditional_t<requires { typename A::Real; }, A, B>::Real;
  using Value = Real;
  static constexpr bool kStoreByReference = false;

  StoreAs<A> a;
  StoreAs<B> b;
  Real value;

  BinaryNode(const A& a_, const B& b_) : a(a_), b(b_), value(Op::primal(a.getValue(), b.getValue())) {}

  Real getValue() const { return value; }
  std::size_t countActive() const { return a.countActive() + b.countActive(); }

  template <typename Recorder>
  void record(Recorder& recorder) const {
    a.record(recorder);
    b.record(recorder);
  }

  struct Replay {
    // Streams are read backwards, so the right operand is replayed first.
    typename B::Replay b;
    typename A::Replay a;
    Real value;

    template <typename Context>
    explicit Replay(Context& context) : b(context), a(context), value(Op::primal(a.value, b.value)) {}

    template <typename Context>
    void backward(Real bar, Context& context) {
      a.backward(Op::da(a.value, b.value, value) * bar, context);
      b.backward(Op::db(a.value, b.value, value) * bar, context);
    }
  };
};

/// Scalar constant inside a scalar expression.
template <typename Real>
struct ScalarConstant : ScalarExpression<ScalarConstant<Real>>, Constant<Real> {
  using Constant<Real>::Constant;
};

namespace detail {

template <typename A>
using RealOf = typename A::Real;

template <template <typename> class Op, typename A, typename B>
auto binary(const A& a, const B& b) {
  return BinaryNode<Op<RealOf<A>>, A, B>(a, b);
}

template <template <typename> class Op, typename A>
auto binaryConstRight(const A& a, RealOf<A> c) {
  using C = Constant<RealOf<A>>;
  return BinaryNode<Op<RealOf<A>>, A, C>(a, C(c));
}

template <template <typename> class Op, typename A>
auto binaryConstLeft(RealOf<A> c, const A& a) {
  using C = Constant<RealOf<A>>;
  return BinaryNode<Op<RealOf<A>>, C, A>(C(c), a);
}

}  // namespace detail

#define DSLAD_SCALAR_BINARY(OPERATOR, OP)                                                          \
  template <typename A, typename B>                                                                \
    requires std::is_same_v<typename A::Real, typename B::Real>                                    \
  auto OPERATOR(const ScalarExpression<A>& a, const ScalarExpression<B>& b) {                      \
    return detail::binary<ops::OP>(a.cast(), b.cast());                                           \
  }                                                                                                \
  template <typename A>                                                                            \
  auto OPERATOR(const ScalarExpression<A>& a, std::type_identity_t<typename A::Real> c) {          \
    return detail::binaryConstRight<ops::OP>(a.cast(), c);                                        \
  }                                                                                                \
  template <typename A>                                                                            \
  auto OPERATOR(std::type_identity_t<typename A::Real> c, const ScalarExpression<A>& a) {          \
    return detail::binaryConstLeft<ops::OP>(c, a.cast());                                         \
  }

DSLAD_SCALAR_BINARY(operator+, Add)
DSLAD_SCALAR_BINARY(operator-, Sub)
DSLAD_SCALAR_BINARY(operator*, Mul)
DSLAD_SCALAR_BINARY(operator/, Div)

#undef DSLAD_SCALAR_BINARY

#define DSLAD_SCALAR_UNARY(NAME, OP)                             \
  template <typename A>                                          \
  auto NAME(const ScalarExpression<A>& a) {                      \
    return UnaryNode<ops::OP<typename A::Real>, A>(a.cast());    \
  }

DSLAD_SCALAR_UNARY(operator-, Neg)
DSLAD_SCALAR_UNARY(sin, Sin)
DSLAD_SCALAR_UNARY(cos, Cos)
DSLAD_SCALAR_UNARY(exp, Exp)
DSLAD_SCALAR_UNARY(log, Log)
DSLAD_SCALAR_UNARY(sqrt, Sqrt)
DSLAD_SCALAR_UNARY(square, Square)

#undef DSLAD_SCALAR_UNARY

/// Power with a passive exponent. An active exponent goes through exp(e * log(b)).
template <typename A>
auto pow(const ScalarExpression<A>& base, std::type_identity_t<typename A::Real> exponent) {
  return detail::binaryConstRight<ops::Pow>(base.cast(), exponent);
}

template <typename A, typename B>
  requires std::is_same_v<typename A::Real, typename B::Real>
auto pow(const ScalarExpression<A>& base, const ScalarExpression<B>& exponent) {
  return exp(exponent * log(base));
}

// Comparisons act on primal values.
#define DSLAD_SCALAR_COMPARE(OP)                                                              \
  template <typename A, typename B>                                                           \
  bool operator OP(const ScalarExpression<A>& a, const ScalarExpression<B>& b) {              \
    return a.cast().getValue() OP b.cast().getValue();                                        \
  }                                                                                           \
  template <typename A>                                                                       \
  bool operator OP(const ScalarExpression<A>& a, std::type_identity_t<typename A::Real> c) {  \
    return a.cast().getValue() OP c;                                                          \
  }                                                                                           \
  template <typename A>                                                                       \
  bool operator OP(std::type_identity_t<typename A::Real> c, const ScalarExpression<A>& a) {  \
    return c OP a.cast().getValue();                                                          \
  }

DSLAD_SCALAR_COMPARE(<)
DSLAD_SCALAR_COMPARE(>)
DSLAD_SCALAR_COMPARE(<=)
DSLAD_SCALAR_COMPARE(>=)
DSLAD_SCALAR_COMPARE(==)
DSLAD_SCALAR_COMPARE(!=)

#undef DSLAD_SCALAR_COMPARE

}  // namespace dslad
