#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <type_traits>
#include <vector>

#include "dslad/tape/chunked_stream.hpp"

namespace dslad {

/**
 * Descriptor of a value type that can live on the tape.
 *
 * Specializations provide:
 *   static constexpr const char* name;
 *   static constexpr std::size_t alignment;
 *   static constexpr std::size_t fixedEncodedSize;   // 0 for variable size
 *   static std::size_t encodedSize(const T&);
 *   static void encode(std::byte* out, const T&);
 *   static T decode(const std::byte* in, std::size_t size);
 *   static T zeroLike(const T& primal);              // adjoint of matching shape
 *   static bool isUnset(const T& adjoint);           // empty adjoint slot
 *   static void accumulate(T& adjoint, const T& x);  // adjoint += x
 *   static void clear(T& adjoint);
 */
template <typename T>
struct ActiveTypeTraits;

/// Traits for trivially copyable values where zero-initialization is the zero adjoint.
template <typename T, std::size_t Align = alignof(T)>
struct TrivialTypeTraits {
  static_assert(std::is_trivially_copyable_v<T>);
  static constexpr std::size_t alignment = Align;
  static constexpr std::size_t fixedEncodedSize = sizeof(T);

  static std::size_t encodedSize(const T&) { return sizeof(T); }
  static void encode(std::byte* out, const T& v) { std::memcpy(out, &v, sizeof(T)); }
  static T decode(const std::byte* in, std::size_t) {
    T v;
    std::memcpy(&v, in, sizeof(T));
    return v;
  }
  static T zeroLike(const T&) { return T{}; }
  static bool isUnset(const T&) { return false; }
  static void accumulate(T& adjoint, const T& x) { adjoint += x; }
  static void clear(T& adjoint) { adjoint = T{}; }
};

template <>
struct ActiveTypeTraits<double> : TrivialTypeTraits<double> {
  static constexpr const char* name = "double";
};

template <>
struct ActiveTypeTraits<float> : TrivialTypeTraits<float> {
  static constexpr const char* name = "float";
};

template <>
struct ActiveTypeTraits<int> : TrivialTypeTraits<int> {
  static constexpr const char* name = "int";
};

template <>
struct ActiveTypeTraits<bool> : TrivialTypeTraits<bool> {
  static constexpr const char* name = "bool";
  static void accumulate(bool&, const bool&) {}
};

/// Push and pop of typed objects on a byte stream using the traits codec.
template <typename T>
struct ConstantCodec {
  using Traits = ActiveTypeTraits<T>;

  static void push(ByteStream& stream, const T& value) {
    if constexpr (Traits::fixedEncodedSize != 0) {
      Traits::encode(stream.beginObject(Traits::fixedEncodedSize), value);
    } else {
      const std::size_t size = Traits::encodedSize(value);
      Traits::encode(stream.beginObject(size), value);
      const auto trailer = static_cast<std::uint32_t>(size);
      stream.pushRaw(&trailer, sizeof(trailer));
    }
  }

  static T pop(ByteStream& stream, const char* what) {
    if constexpr (Traits::fixedEncodedSize != 0) {
      return Traits::decode(stream.popObject(Traits::fixedEncodedSize, what), Traits::fixedEncodedSize);
    } else {
      const auto size = stream.popRaw<std::uint32_t>(what);
      return Traits::decode(stream.popObject(size, what), size);
    }
  }

  /// Encodes into a flat buffer, including the trailer for variable sizes.
  static std::vector<std::byte> toBytes(const T& value) {
    ByteStream stream;
    push(stream, value);
    std::vector<std::byte> out;
    stream.forEachByte([&](std::byte b) { out.push_back(b); });
    return out;
  }
};

}  // namespace dslad
