#pragma once

#include "dslad/dsl/active_object.hpp"
#include "dslad/dsl/type_traits.hpp"
#include "dslad/expression.hpp"
#include "dslad/scalar/active_scalar.hpp"
#include "dslad/tape/tape.hpp"
