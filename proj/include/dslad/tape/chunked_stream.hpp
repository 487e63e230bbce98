#pragma once

#include <algorithm>
#include <cstddef>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace dslad {

inline constexpr std::size_t kDefaultChunkEntries = std::size_t{1} << 16;

/// Thrown when the reverse sweep reads past the beginning of a stream or finds
/// data that does not match what the handle expects.
class TapeCorrupted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StreamStats {
  std::size_t entries = 0;
  std::size_t bytes = 0;
  std::size_t allocatedBytes = 0;
};

/**
 * Append-only storage split into fixed-capacity chunks.
 *
 * Entries are appended during recording and popped from the back during the
 * reverse sweep. Chunks stay allocated across clear() so that repeated
 * record/reverse cycles do not reallocate.
 */
template <typename T>
class ChunkedStream {
  static_assert(std::is_trivially_copyable_v<T>);

 public:
  explicit ChunkedStream(std::size_t chunkEntries = kDefaultChunkEntries)
      : chunkEntries_(std::max<std::size_t>(chunkEntries, 1)) {}

  void push(const T& value) {
    Chunk& chunk = reserve(1);
    chunk.data[chunk.used++] = value;
    ++entries_;
  }

  /// Appends `count` entries contiguously within one chunk.
  T* pushBlock(std::size_t count) {
    Chunk& chunk = reserve(count);
    T* out = chunk.data.get() + chunk.used;
    chunk.used += count;
    entries_ += count;
    return out;
  }

  T pop(const char* what) {
    Chunk& chunk = nonEmptyTail(1, what);
    --entries_;
    return chunk.data[--chunk.used];
  }

  /// Removes the last `count` entries, which must have been pushed as one block.
  const T* popBlock(std::size_t count, const char* what) {
    Chunk& chunk = nonEmptyTail(count, what);
    chunk.used -= count;
    entries_ -= count;
    return chunk.data.get() + chunk.used;
  }

  std::size_t size() const { return entries_; }
  bool empty() const { return entries_ == 0; }

  void clear() {
    for (Chunk& chunk : chunks_) {
      chunk.used = 0;
    }
    active_ = 0;
    entries_ = 0;
  }

  std::size_t usedBytes() const {
    std::size_t n = 0;
    for (const Chunk& chunk : chunks_) {
      n += chunk.used * sizeof(T);
    }
    return n;
  }

  std::size_t allocatedBytes() const {
    std::size_t n = 0;
    for (const Chunk& chunk : chunks_) {
      n += chunk.capacity * sizeof(T);
    }
    return n;
  }

  std::size_t chunkCount() const { return chunks_.size(); }

  /// Forward iteration over all entries, oldest first.
  template <typename F>
  void forEach(F&& f) const {
    for (std::size_t c = 0; c < chunks_.size() && c <= active_; ++c) {
      for (std::size_t i = 0; i < chunks_[c].used; ++i) {
        f(chunks_[c].data[i]);
      }
    }
  }

 private:
  struct Chunk {
    std::unique_ptr<T[]> data;
    std::size_t capacity = 0;
    std::size_t used = 0;
  };

  Chunk& reserve(std::size_t count) {
    if (chunks_.empty()) {
      chunks_.push_back(makeChunk(count));
      active_ = 0;
    }
    if (chunks_[active_].capacity - chunks_[active_].used >= count) {
      return chunks_[active_];
    }
    ++active_;
    if (active_ == chunks_.size()) {
      chunks_.push_back(makeChunk(count));
    } else if (chunks_[active_].capacity < count) {
      chunks_[active_] = makeChunk(count);
    }
    chunks_[active_].used = 0;
    return chunks_[active_];
  }

  Chunk makeChunk(std::size_t atLeast) const {
    Chunk chunk;
    chunk.capacity = std::max(chunkEntries_, atLeast);
    chunk.data = std::make_unique<T[]>(chunk.capacity);
    return chunk;
  }

  Chunk& nonEmptyTail(std::size_t count, const char* what) {
    while (!chunks_.empty() && chunks_[active_].used == 0 && active_ > 0) {
      --active_;
    }
    if (chunks_.empty() || chunks_[active_].used < count) {
      throw TapeCorrupted(std::string("dslad: stream underflow while reading ") + what);
    }
    return chunks_[active_];
  }

  std::vector<Chunk> chunks_;
  std::size_t active_ = 0;
  std::size_t entries_ = 0;
  std::size_t chunkEntries_;
};

/**
 * Byte stream for type-erased payloads (old lhs data, constants).
 *
 * Every object is stored contiguously. Objects of variable encoded size are
 * followed by a 32 bit length trailer so they can be popped from the back.
 */
class ByteStream {
 public:
  explicit ByteStream(std::size_t chunkBytes = kDefaultChunkEntries) : bytes_(chunkBytes) {}

  std::byte* beginObject(std::size_t size) {
    ++objects_;
    return bytes_.pushBlock(size);
  }

  void pushRaw(const void* data, std::size_t size) {
    std::memcpy(bytes_.pushBlock(size), data, size);
  }

  template <typename T>
  void pushTrivial(const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::memcpy(beginObject(sizeof(T)), &value, sizeof(T));
  }

  template <typename T>
  T popTrivial(const char* what) {
    static_assert(std::is_trivially_copyable_v<T>);
    T value;
    std::memcpy(&value, bytes_.popBlock(sizeof(T), what), sizeof(T));
    --objects_;
    return value;
  }

  const std::byte* popObject(std::size_t size, const char* what) {
    const std::byte* p = bytes_.popBlock(size, what);
    --objects_;
    return p;
  }

  template <typename T>
  T popRaw(const char* what) {
    T value;
    std::memcpy(&value, bytes_.popBlock(sizeof(T), what), sizeof(T));
    return value;
  }

  std::size_t objects() const { return objects_; }
  std::size_t usedBytes() const { return bytes_.usedBytes(); }
  std::size_t allocatedBytes() const { return bytes_.allocatedBytes(); }

  void clear() {
    bytes_.clear();
    objects_ = 0;
  }

  template <typename F>
  void forEachByte(F&& f) const {
    bytes_.forEach(f);
  }

 private:
  ChunkedStream<std::byte> bytes_;
  std::size_t objects_ = 0;
};

}  // namespace dslad
