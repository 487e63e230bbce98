// Generated by dslgen from mult.xml. Do not edit.
#pragma once

#include "dsl_fwd.gen.hpp"

namespace multdsl {

/// Base of every expression whose value is a Vector.
template <typename D>
struct VectorExpression {
  using RType = Vector;

  const D& cast() const { return static_cast<const D&>(*this); }
};

}  // namespace multdsl
