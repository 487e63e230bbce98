#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dslad {

using Index = std::uint32_t;
using TypeTag = std::uint8_t;

inline constexpr Index kPassiveIndex = 0;
inline constexpr TypeTag kScalarTag = 0;

/// Identifiers share a 32 bit word with the type tag on the streams, so every
/// index manager is limited to 24 bit indices.
inline constexpr unsigned kIndexBits = 24;
inline constexpr Index kMaxIndex = (Index{1} << kIndexBits) - 1;

/// (typeTag, index) packed into one stream word.
struct TaggedIndex {
  std::uint32_t packed = 0;

  static constexpr TaggedIndex make(TypeTag tag, Index index) {
    return TaggedIndex{(std::uint32_t{tag} << kIndexBits) | index};
  }
  constexpr TypeTag tag() const { return static_cast<TypeTag>(packed >> kIndexBits); }
  constexpr Index index() const { return packed & kMaxIndex; }
  friend constexpr bool operator==(TaggedIndex, TaggedIndex) = default;
};

/**
 * Reuse index management.
 *
 * Released indices go to a LIFO pool and are handed out again before the
 * high-water mark grows. Index 0 is never handed out; it marks passive values.
 */
class IndexManager {
 public:
  Index acquire() {
    Index id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
    } else {
      if (highWater_ == kMaxIndex) {
        throw std::length_error("dslad: index manager exhausted (24 bit identifier space)");
      }
      id = ++highWater_;
      live_.resize(highWater_ + 1, 0);
    }
    live_[id] = 1;
    ++liveCount_;
    return id;
  }

  /// Releasing the passive index is a no-op. Releasing an index that is not
  /// live is a contract violation; release builds ignore it.
  void release(Index id) {
    if (id == kPassiveIndex) {
      return;
    }
    assert(id <= highWater_ && live_[id] && "dslad: double release of an identifier");
    if (id > highWater_ || !live_[id]) {
      return;
    }
    live_[id] = 0;
    --liveCount_;
    free_.push_back(id);
  }

  bool isLive(Index id) const { return id != kPassiveIndex && id <= highWater_ && live_[id]; }

  Index highWaterMark() const { return highWater_; }
  std::size_t freeCount() const { return free_.size(); }
  std::size_t liveCount() const { return liveCount_; }

  void reset() {
    free_.clear();
    live_.assign(1, 0);
    highWater_ = 0;
    liveCount_ = 0;
  }

 private:
  std::vector<Index> free_;
  std::vector<std::uint8_t> live_ = std::vector<std::uint8_t>(1, 0);
  Index highWater_ = 0;
  std::size_t liveCount_ = 0;
};

}  // namespace dslad
