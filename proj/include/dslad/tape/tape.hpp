#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dslad/dsl/type_storage.hpp"
#include "dslad/dsl/type_traits.hpp"
#include "dslad/tape/chunked_stream.hpp"
#include "dslad/tape/handle_registry.hpp"
#include "dslad/tape/index_manager.hpp"
#include "dslad/tape/memory_report.hpp"

namespace dslad {

template <typename Real>
class Tape;

/// Collects the rhs identifiers and constants of one statement while it is recorded.
template <typename Real>
class StatementRecorder {
 public:
  explicit StatementRecorder(Tape<Real>& tape) : tape_(tape) {}

  /// An active-typed leaf. Leaves that are passive at runtime (index 0) also
  /// store their value so the reverse sweep can replay the expression.
  template <typename T>
  void pushActive(Index index, const T& value) {
    tape_.rhs_.push(TaggedIndex::make(tape_.template tagOf<T>(), index));
    if (index == kPassiveIndex) {
      ConstantCodec<T>::push(tape_.constants_, value);
    }
    ++arguments_;
  }

  template <typename T>
  void pushConstant(const T& value) {
    ConstantCodec<T>::push(tape_.constants_, value);
  }

  std::size_t arguments() const { return arguments_; }

 private:
  Tape<Real>& tape_;
  std::size_t arguments_ = 0;
};

/// Everything a reverse routine needs for one statement.
template <typename Real>
class ReverseContext {
 public:
  explicit ReverseContext(Tape<Real>& tape) : tape_(tape) {}

  Tape<Real>& tape() { return tape_; }
  TaggedIndex lhs() const { return lhs_; }
  /// Lhs adjoint for statements with a scalar lhs.
  Real seed() const { return seed_; }
  std::size_t activeArguments() const { return arguments_; }

  TaggedIndex popArgument() {
    if (consumed_ == arguments_) {
      throw TapeCorrupted("dslad: handle read more rhs identifiers than recorded");
    }
    ++consumed_;
    return tape_.rhs_.pop("rhs identifiers");
  }

  template <typename T>
  T popConstant() {
    return ConstantCodec<T>::pop(tape_.constants_, "constant data");
  }

  Real primal(Index id) const { return tape_.primals_[id]; }
  Real& adjoint(Index id) { return tape_.adjoints_[id]; }

  template <typename T>
  TypeStorage<T>& storage() {
    return tape_.template storage<T>();
  }

  template <typename T>
  TypeTag tagOf() const {
    return tape_.template tagOf<T>();
  }

 private:
  friend class Tape<Real>;

  void begin(TaggedIndex lhs, std::size_t arguments, Real seed) {
    lhs_ = lhs;
    arguments_ = arguments;
    consumed_ = 0;
    seed_ = seed;
  }

  Tape<Real>& tape_;
  TaggedIndex lhs_;
  std::size_t arguments_ = 0;
  std::size_t consumed_ = 0;
  Real seed_ = 0;
};

/**
 * Primal value tape with index reuse.
 *
 * Six streams hold the statements: lhs identifier, lhs old data, function
 * handle and active-argument count per statement, one rhs identifier per
 * active argument, and the constant data. Scalars live in the tape's own
 * primal/adjoint vectors; every registered DSL type has its own vectors and
 * index manager, while the streams are shared.
 *
 * A tape is single threaded. Active values find their tape through
 * Tape::current(), which is a per-thread setting.
 */
template <typename Real>
class Tape {
  static_assert(std::is_floating_point_v<Real>);

 public:
  using Registry = HandleRegistry<Real>;

  struct Options {
    std::size_t chunkEntries = kDefaultChunkEntries;
  };

  Tape() : Tape(Options{}) {}
  explicit Tape(Options options)
      : lhs_(options.chunkEntries),
        oldData_(options.chunkEntries),
        handles_(options.chunkEntries),
        arguments_(options.chunkEntries),
        rhs_(options.chunkEntries),
        constants_(options.chunkEntries),
        primals_(1, Real(0)),
        adjoints_(1, Real(0)) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape& current() { return *currentSlot(); }

  /// Installs a tape as the current one of this thread for the lifetime of the guard.
  class Scope {
   public:
    explicit Scope(Tape& tape) : previous_(std::exchange(currentSlot(), &tape)) {}
    ~Scope() { currentSlot() = previous_; }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  void setActive() { active_ = true; }
  void setPassive() { active_ = false; }
  bool isActive() const { return active_; }

  // Scalar index management.

  Index acquireIndex() {
    const Index id = indices_.acquire();
    if (id >= primals_.size()) {
      const std::size_t n = std::max<std::size_t>(primals_.size() * 2, std::size_t{id} + 1);
      primals_.resize(n, Real(0));
      adjoints_.resize(n, Real(0));
    }
    return id;
  }

  void releaseIndex(Index id) {
    if (id == kPassiveIndex) {
      return;
    }
    adjoints_[id] = Real(0);
    indices_.release(id);
  }

  const IndexManager& indexManager() const { return indices_; }

  Real primal(Index id) const { return primals_.at(id); }
  std::span<const Real> primals() const { return primals_; }

  Real getGradient(Index id) const {
    if (id == kPassiveIndex) {
      return Real(0);
    }
    checkIndex(id);
    return adjoints_[id];
  }

  void setGradient(Index id, Real value) {
    if (id == kPassiveIndex) {
      throw std::invalid_argument("dslad: cannot set the gradient of a passive value");
    }
    checkIndex(id);
    adjoints_[id] = value;
  }

  /// Low-level recording of a scalar statement with an explicit handle.
  /// The rhs identifiers and constants are stored in the given order.
  void recordStatement(Index lhsId, HandleId handle, std::span<const Index> activeArgIds,
                       std::span<const Real> constants, Real newPrimal) {
    if (lhsId == kPassiveIndex) {
      throw std::invalid_argument("dslad: statement lhs must be active");
    }
    checkIndex(lhsId);
    if (active_) {
      if (Registry::instance().find(handle) == nullptr) {
        throw std::invalid_argument("dslad: recording an unregistered handle " + std::to_string(handle));
      }
      if (activeArgIds.size() > kMaxArguments) {
        throw std::length_error("dslad: too many active arguments in one statement");
      }
      for (Index id : activeArgIds) {
        rhs_.push(TaggedIndex::make(kScalarTag, id));
      }
      for (Real c : constants) {
        constants_.pushTrivial(c);
      }
      pushStatement(TaggedIndex::make(kScalarTag, lhsId), handle, activeArgIds.size());
      oldData_.pushTrivial(primals_[lhsId]);
    }
    primals_[lhsId] = newPrimal;
  }

  /**
   * Records `lhs = rhs` as one statement. Statements without active arguments
   * or recorded while the tape is passive deactivate the lhs instead.
   */
  template <typename T, typename Expr>
  void store(Index& lhsIndex, const T& value, const Expr& rhs) {
    if (!active_ || rhs.countActive() == 0) {
      releaseTyped<T>(lhsIndex);
      lhsIndex = kPassiveIndex;
      return;
    }
    StatementRecorder<Real> recorder(*this);
    rhs.record(recorder);
    if (recorder.arguments() > kMaxArguments) {
      throw std::length_error("dslad: too many active arguments in one statement");
    }
    if (lhsIndex == kPassiveIndex) {
      lhsIndex = acquireTyped<T>();
    }
    pushStatement(TaggedIndex::make(tagOf<T>(), lhsIndex), statementHandle<T, Expr>(),
                  recorder.arguments());
    T& slot = primalSlot<T>(lhsIndex);
    ConstantCodec<T>::push(oldData_, slot);
    slot = value;
  }

  /// Makes `index` an input: acquires an identifier if needed and stores the value.
  template <typename T>
  void registerInput(Index& index, const T& value) {
    if (index == kPassiveIndex) {
      index = acquireTyped<T>();
    }
    primalSlot<T>(index) = value;
  }

  template <typename T>
  Index acquireTyped() {
    if constexpr (std::is_same_v<T, Real>) {
      return acquireIndex();
    } else {
      return storage<T>().acquire();
    }
  }

  template <typename T>
  void releaseTyped(Index index) {
    if (index == kPassiveIndex) {
      return;
    }
    if constexpr (std::is_same_v<T, Real>) {
      releaseIndex(index);
    } else {
      storage<T>().release(index);
    }
  }

  template <typename T>
  T& primalSlot(Index index) {
    if constexpr (std::is_same_v<T, Real>) {
      return primals_[index];
    } else {
      return storage<T>().primal(index);
    }
  }

  /**
   * Reverse sweep: statements are processed from last to first. For each one
   * the lhs adjoint is taken and zeroed, the old lhs primal is restored and
   * then the handle accumulates into the argument adjoints. The streams are
   * empty afterwards.
   */
  void evaluateReverse() {
    if (active_) {
      throw std::logic_error("dslad: stop recording before evaluating the tape");
    }
    const Registry& registry = Registry::instance();
    ReverseContext<Real> context(*this);
    std::size_t position = handles_.size();
    while (position > 0) {
      --position;
      const TaggedIndex lhs = lhs_.pop("lhs identifiers");
      const HandleId handle = handles_.pop("function handles");
      const std::size_t arguments = arguments_.pop("active argument counts");
      const auto fn = registry.find(handle);
      if (fn == nullptr) {
        throw TapeCorrupted("dslad: unregistered handle " + std::to_string(handle) + " at statement " +
                            std::to_string(position));
      }
      if (reverseTrace_ != nullptr) {
        reverseTrace_->push_back(handle);
      }
      Real seed = 0;
      if (lhs.tag() == kScalarTag) {
        const Index id = lhs.index();
        if (id == kPassiveIndex || id >= primals_.size()) {
          throw TapeCorrupted("dslad: invalid lhs identifier at statement " + std::to_string(position));
        }
        seed = adjoints_[id];
        adjoints_[id] = Real(0);
        primals_[id] = oldData_.popTrivial<Real>("lhs old data");
      } else {
        TypeStorageBase* type = byTag_[lhs.tag()].get();
        if (type == nullptr) {
          throw TapeCorrupted("dslad: unknown type tag at statement " + std::to_string(position));
        }
        type->beginReverse(lhs.index(), oldData_);
      }
      context.begin(lhs, arguments, seed);
      fn(context);
      if (context.consumed_ != arguments) {
        throw TapeCorrupted("dslad: handle consumed " + std::to_string(context.consumed_) + " of " +
                            std::to_string(arguments) + " rhs identifiers at statement " +
                            std::to_string(position));
      }
    }
    if (!rhs_.empty() || constants_.usedBytes() != 0 || oldData_.usedBytes() != 0) {
      throw TapeCorrupted("dslad: streams not fully consumed by the reverse sweep");
    }
    clearStreams();
  }

  /// Clears the streams, zeroes all primals and adjoints and restarts every
  /// index manager. Active values still alive refer to stale identifiers afterwards.
  void reset() {
    clearStreams();
    std::fill(primals_.begin(), primals_.end(), Real(0));
    std::fill(adjoints_.begin(), adjoints_.end(), Real(0));
    indices_.reset();
    for (auto& type : byTag_) {
      if (type) {
        type->reset();
      }
    }
  }

  MemoryReport memoryReport() const {
    MemoryReport r;
    r.statements = handles_.size();
    r.rhsIds = rhs_.size();
    r.constants = constants_.objects();
    r.lhsIdentifiers = stats(lhs_);
    r.lhsOldData = {oldData_.objects(), oldData_.usedBytes(), oldData_.allocatedBytes()};
    r.functionHandles = stats(handles_);
    r.activeArguments = stats(arguments_);
    r.rhsIdentifiers = stats(rhs_);
    r.constantData = {constants_.objects(), constants_.usedBytes(), constants_.allocatedBytes()};
    VectorStats scalar;
    scalar.name = ActiveTypeTraits<Real>::name;
    scalar.tag = kScalarTag;
    scalar.slots = primals_.size();
    scalar.bytes = (primals_.capacity() + adjoints_.capacity()) * sizeof(Real);
    scalar.live = indices_.liveCount();
    r.vectors.push_back(scalar);
    for (const auto& type : byTag_) {
      if (type) {
        r.vectors.push_back(type->stats());
      }
    }
    return r;
  }

  std::size_t statementCount() const { return handles_.size(); }

  /// Handles in recording order.
  std::vector<HandleId> recordedHandles() const {
    std::vector<HandleId> out;
    handles_.forEach([&](HandleId h) { out.push_back(h); });
    return out;
  }

  /// Rhs identifiers in recording order.
  std::vector<TaggedIndex> recordedArguments() const {
    std::vector<TaggedIndex> out;
    rhs_.forEach([&](TaggedIndex t) { out.push_back(t); });
    return out;
  }

  std::vector<TaggedIndex> recordedLhs() const {
    std::vector<TaggedIndex> out;
    lhs_.forEach([&](TaggedIndex t) { out.push_back(t); });
    return out;
  }

  std::vector<std::size_t> recordedArgumentCounts() const {
    std::vector<std::size_t> out;
    arguments_.forEach([&](std::uint8_t n) { out.push_back(n); });
    return out;
  }

  std::vector<std::byte> recordedConstantBytes() const {
    std::vector<std::byte> out;
    constants_.forEachByte([&](std::byte b) { out.push_back(b); });
    return out;
  }

  std::vector<std::byte> recordedOldDataBytes() const {
    std::vector<std::byte> out;
    oldData_.forEachByte([&](std::byte b) { out.push_back(b); });
    return out;
  }

  /// Collects the handles in the order the reverse sweep invokes them.
  void traceReverse(std::vector<HandleId>* trace) { reverseTrace_ = trace; }

  // DSL type registry.

  template <typename T>
  TypeTag registerType(TypeTag tag) {
    static_assert(!std::is_same_v<T, Real>, "the tape scalar is registered implicitly");
    if (tag == kScalarTag) {
      throw std::invalid_argument("dslad: type tag 0 is reserved for the tape scalar");
    }
    if (byTag_[tag]) {
      throw std::invalid_argument("dslad: type tag " + std::to_string(tag) + " is already registered");
    }
    const std::size_t key = typeKey<T>();
    if (key < byKey_.size() && byKey_[key] != nullptr) {
      throw std::invalid_argument(std::string("dslad: type ") + ActiveTypeTraits<T>::name +
                                  " is already registered");
    }
    if (key >= byKey_.size()) {
      byKey_.resize(key + 1, nullptr);
    }
    auto storage = std::make_unique<TypeStorage<T>>(tag);
    byKey_[key] = storage.get();
    byTag_[tag] = std::move(storage);
    return tag;
  }

  template <typename T>
  bool hasType() const {
    if constexpr (std::is_same_v<T, Real>) {
      return true;
    } else {
      const std::size_t key = typeKey<T>();
      return key < byKey_.size() && byKey_[key] != nullptr;
    }
  }

  template <typename T>
  TypeStorage<T>& storage() {
    const std::size_t key = typeKey<T>();
    if (key >= byKey_.size() || byKey_[key] == nullptr) {
      throw std::logic_error(std::string("dslad: type ") + ActiveTypeTraits<T>::name +
                             " is not registered on this tape");
    }
    return *static_cast<TypeStorage<T>*>(byKey_[key]);
  }

  template <typename T>
  TypeTag tagOf() {
    if constexpr (std::is_same_v<T, Real>) {
      return kScalarTag;
    } else {
      return storage<T>().tag();
    }
  }

  static constexpr std::size_t kMaxArguments = 255;

 private:
  friend class StatementRecorder<Real>;
  friend class ReverseContext<Real>;

  static Tape*& currentSlot() {
    thread_local Tape fallback;
    thread_local Tape* slot = &fallback;
    return slot;
  }

  template <typename T, typename Expr>
  static void reverseStatement(ReverseContext<Real>& context) {
    typename Expr::Replay replay(context);
    if constexpr (std::is_same_v<T, Real>) {
      const Real seed = context.seed();
      if (seed != Real(0)) {
        replay.backward(seed, context);
      }
    } else {
      const T& seed = context.template storage<T>().seed();
      if constexpr (requires { ActiveTypeTraits<T>::isZero(seed); }) {
        if (ActiveTypeTraits<T>::isZero(seed)) {
          return;
        }
      }
      replay.backward(seed, context);
    }
  }

  template <typename T, typename Expr>
  static HandleId statementHandle() {
    static const HandleId handle = Registry::instance().add(&reverseStatement<T, Expr>);
    return handle;
  }

  void pushStatement(TaggedIndex lhs, HandleId handle, std::size_t arguments) {
    lhs_.push(lhs);
    handles_.push(handle);
    arguments_.push(static_cast<std::uint8_t>(arguments));
  }

  void checkIndex(Index id) const {
    if (id > indices_.highWaterMark() || id >= adjoints_.size()) {
      throw std::out_of_range("dslad: identifier " + std::to_string(id) + " beyond the high-water mark");
    }
  }

  void clearStreams() {
    lhs_.clear();
    oldData_.clear();
    handles_.clear();
    arguments_.clear();
    rhs_.clear();
    constants_.clear();
  }

  template <typename S>
  static StreamStats stats(const ChunkedStream<S>& s) {
    return {s.size(), s.usedBytes(), s.allocatedBytes()};
  }

  bool active_ = false;

  ChunkedStream<TaggedIndex> lhs_;
  ByteStream oldData_;
  ChunkedStream<HandleId> handles_;
  ChunkedStream<std::uint8_t> arguments_;
  ChunkedStream<TaggedIndex> rhs_;
  ByteStream constants_;

  IndexManager indices_;
  std::vector<Real> primals_;
  std::vector<Real> adjoints_;

  std::array<std::unique_ptr<TypeStorageBase>, 256> byTag_{};
  std::vector<TypeStorageBase*> byKey_;

  std::vector<HandleId>* reverseTrace_ = nullptr;
};

}  // namespace dslad
