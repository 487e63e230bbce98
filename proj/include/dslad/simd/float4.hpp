#pragma once

#include <cmath>
#include <cstring>
#include <ostream>

#include "dslad/dsl/type_traits.hpp"

namespace dslad::simd {

/// Four single-precision lanes in one 16-byte register.
class Float4 {
 public:
  using Native = float __attribute__((vector_size(16)));

  Float4() : v_{0.0f, 0.0f, 0.0f, 0.0f} {}
  Float4(float a, float b, float c, float d) : v_{a, b, c, d} {}
  explicit Float4(float s) : v_{s, s, s, s} {}
  explicit Float4(Native v) : v_(v) {}

  float operator[](int lane) const { return v_[lane]; }
  void set(int lane, float x) { v_[lane] = x; }
  Native native() const { return v_; }

  Float4& operator+=(const Float4& o) {
    v_ += o.v_;
    return *this;
  }
  Float4& operator-=(const Float4& o) {
    v_ -= o.v_;
    return *this;
  }
  Float4& operator*=(const Float4& o) {
    v_ *= o.v_;
    return *this;
  }

  friend Float4 operator+(const Float4& a, const Float4& b) { return Float4(a.v_ + b.v_); }
  friend Float4 operator-(const Float4& a, const Float4& b) { return Float4(a.v_ - b.v_); }
  friend Float4 operator*(const Float4& a, const Float4& b) { return Float4(a.v_ * b.v_); }
  friend Float4 operator/(const Float4& a, const Float4& b) { return Float4(a.v_ / b.v_); }
  friend Float4 operator-(const Float4& a) { return Float4(-a.v_); }
  friend Float4 operator*(float s, const Float4& a) { return Float4(s * a.v_); }
  friend Float4 operator*(const Float4& a, float s) { return Float4(a.v_ * s); }

  friend bool operator==(const Float4& a, const Float4& b) {
    return a[0] == b[0] && a[1] == b[1] && a[2] == b[2] && a[3] == b[3];
  }

  float sum() const { return (v_[0] + v_[1]) + (v_[2] + v_[3]); }
  bool isZero() const { return v_[0] == 0.0f && v_[1] == 0.0f && v_[2] == 0.0f && v_[3] == 0.0f; }

  friend std::ostream& operator<<(std::ostream& os, const Float4& a) {
    return os << '[' << a[0] << ' ' << a[1] << ' ' << a[2] << ' ' << a[3] << ']';
  }

 private:
  Native v_;
};

static_assert(sizeof(Float4) == 16 && alignof(Float4) == 16);

}  // namespace dslad::simd

namespace dslad {

template <>
struct ActiveTypeTraits<simd::Float4> : TrivialTypeTraits<simd::Float4, 16> {
  static constexpr const char* name = "Float4";
  static bool isZero(const simd::Float4& x) { return x.isZero(); }
};

}  // namespace dslad
