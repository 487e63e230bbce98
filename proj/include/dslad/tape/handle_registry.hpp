#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <stdexcept>

namespace dslad {

using HandleId = std::uint32_t;

template <typename Real>
class ReverseContext;

/**
 * Table of reverse routines keyed by a dense handle id.
 *
 * Handles are registered once per statement kind (usually from a function-local
 * static) and never removed, so lookups need no lock.
 */
template <typename Real>
class HandleRegistry {
 public:
  using ReverseFn = void (*)(ReverseContext<Real>&);
  static constexpr std::size_t kCapacity = std::size_t{1} << 16;

  static HandleRegistry& instance() {
    static HandleRegistry registry;
    return registry;
  }

  HandleId add(ReverseFn fn) {
    std::lock_guard lock(mutex_);
    const std::size_t n = count_.load(std::memory_order_relaxed);
    if (n == kCapacity) {
      throw std::length_error("dslad: handle registry full");
    }
    table_[n] = fn;
    count_.store(n + 1, std::memory_order_release);
    return static_cast<HandleId>(n);
  }

  /// nullptr if the id was never registered.
  ReverseFn find(HandleId id) const {
    if (id >= count_.load(std::memory_order_acquire)) {
      return nullptr;
    }
    return table_[id];
  }

  std::size_t size() const { return count_.load(std::memory_order_acquire); }

 private:
  HandleRegistry() = default;

  std::mutex mutex_;
  std::array<ReverseFn, kCapacity> table_{};
  std::atomic<std::size_t> count_{0};
};

}  // namespace dslad
