#pragma once

#include <string>
#include <vector>

namespace dslad::codegen {

/// Activity of every argument of one generated variant.
struct ActivityPattern {
  std::vector<bool> active;

  /// One letter per argument, e.g. "AP": A active, P passive.
  std::string str() const;
  std::size_t activeCount() const;
};

/**
 * All nonempty subsets of the differentiable arguments, as patterns over all
 * arguments (non-differentiable ones are always passive). Ordered by number of
 * active arguments, descending, then by pattern string with A before P.
 */
std::vector<ActivityPattern> enumeratePatterns(const std::vector<bool>& differentiable);

}  // namespace dslad::codegen
