#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "dslad/dsl/type_traits.hpp"
#include "dslad/tape/index_manager.hpp"

namespace dslad {

template <typename T, std::size_t Align>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlign = Align < alignof(T) ? alignof(T) : Align;

  template <typename U>
  struct rebind {
    using other = AlignedAllocator<U, Align>;
  };

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U, Align>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{kAlign}));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t{kAlign}); }

  template <typename U>
  bool operator==(const AlignedAllocator<U, Align>&) const {
    return true;
  }
};

struct VectorStats {
  std::string name;
  TypeTag tag = 0;
  std::size_t slots = 0;
  std::size_t bytes = 0;         // primal + adjoint slot storage
  std::size_t payloadBytes = 0;  // heap data owned by dynamically sized values
  std::size_t live = 0;
};

/// Process-wide dense key per C++ type, used for O(1) storage lookup.
inline std::size_t nextTypeKey() {
  static std::atomic<std::size_t> counter{0};
  return counter++;
}

template <typename T>
std::size_t typeKey() {
  static const std::size_t key = nextTypeKey();
  return key;
}

/// Type-erased view used by the tape for per-type bookkeeping.
class TypeStorageBase {
 public:
  virtual ~TypeStorageBase() = default;

  virtual TypeTag tag() const = 0;
  virtual const char* name() const = 0;
  /// Reverse step (1) and (2) for a statement whose lhs has this type:
  /// move the lhs adjoint into the seed slot, zero it, restore the old primal.
  virtual void beginReverse(Index id, ByteStream& oldData) = 0;
  virtual void reset() = 0;
  virtual VectorStats stats() const = 0;
};

/**
 * Primal and adjoint vectors plus index manager for one registered type.
 * Slot 0 is the passive sink.
 */
template <typename T>
class TypeStorage final : public TypeStorageBase {
 public:
  using Traits = ActiveTypeTraits<T>;
  using Vector = std::vector<T, AlignedAllocator<T, Traits::alignment>>;

  explicit TypeStorage(TypeTag tag) : tag_(tag), primals_(1), adjoints_(1) {}

  TypeTag tag() const override { return tag_; }
  const char* name() const override { return Traits::name; }

  Index acquire() {
    const Index id = indices_.acquire();
    if (id >= primals_.size()) {
      const std::size_t n = std::max<std::size_t>(primals_.size() * 2, std::size_t{id} + 1);
      primals_.resize(n);
      adjoints_.resize(n);
    }
    return id;
  }

  void release(Index id) {
    if (id == kPassiveIndex) {
      return;
    }
    Traits::clear(adjoints_[id]);
    indices_.release(id);
  }

  T& primal(Index id) { return primals_[id]; }
  const T& primal(Index id) const { return primals_[id]; }
  T& adjoint(Index id) { return adjoints_[id]; }
  const T& adjoint(Index id) const { return adjoints_[id]; }

  const T& seed() const { return seed_; }

  void beginReverse(Index id, ByteStream& oldData) override {
    T& adj = adjoints_[id];
    if (Traits::isUnset(adj)) {
      seed_ = Traits::zeroLike(primals_[id]);
    } else {
      seed_ = adj;
    }
    Traits::clear(adj);
    primals_[id] = ConstantCodec<T>::pop(oldData, "lhs old data");
  }

  void reset() override {
    for (T& p : primals_) {
      p = T{};
    }
    for (T& a : adjoints_) {
      Traits::clear(a);
    }
    indices_.reset();
  }

  VectorStats stats() const override {
    VectorStats s;
    s.name = Traits::name;
    s.tag = tag_;
    s.slots = primals_.size();
    s.bytes = 2 * primals_.size() * sizeof(T);
    if constexpr (requires(const T& v) { Traits::payloadBytes(v); }) {
      for (std::size_t i = 0; i < primals_.size(); ++i) {
        s.payloadBytes += Traits::payloadBytes(primals_[i]) + Traits::payloadBytes(adjoints_[i]);
      }
    }
    s.live = indices_.liveCount();
    return s;
  }

  const IndexManager& indices() const { return indices_; }
  const Vector& primals() const { return primals_; }

 private:
  TypeTag tag_;
  IndexManager indices_;
  Vector primals_;
  Vector adjoints_;
  T seed_{};
};

}  // namespace dslad
