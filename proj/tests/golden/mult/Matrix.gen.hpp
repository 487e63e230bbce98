// Generated by dslgen from mult.xml. Do not edit.
#pragma once

#include "dsl_fwd.gen.hpp"

namespace multdsl {

/// Base of every expression whose value is a Matrix.
template <typename D>
struct MatrixExpression {
  using RType = Matrix;

  const D& cast() const { return static_cast<const D&>(*this); }
};

}  // namespace multdsl
