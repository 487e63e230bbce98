#include "dslad/codegen/patterns.hpp"

#include <algorithm>
#include <stdexcept>

namespace dslad::codegen {

std::string ActivityPattern::str() const {
  std::string s;
  for (bool a : active) {
    s += a ? 'A' : 'P';
  }
  return s;
}

std::size_t ActivityPattern::activeCount() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
}

std::vector<ActivityPattern> enumeratePatterns(const std::vector<bool>& differentiable) {
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < differentiable.size(); ++i) {
    if (differentiable[i]) {
      slots.push_back(i);
    }
  }
  if (slots.size() > 16) {
    throw std::length_error("more than 16 differentiable arguments");
  }
  std::vector<ActivityPattern> out;
  const unsigned long subsets = 1ul << slots.size();
  for (unsigned long mask = 1; mask < subsets; ++mask) {
    ActivityPattern p{std::vector<bool>(differentiable.size(), false)};
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (mask & (1ul << k)) {
        p.active[slots[k]] = true;
      }
    }
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const ActivityPattern& a, const ActivityPattern& b) {
    if (a.activeCount() != b.activeCount()) {
      return a.activeCount() > b.activeCount();
    }
    return a.str() < b.str();
  });
  return out;
}

}  // namespace dslad::codegen
