#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace flpath {

/// Exact rational scalar. All breakpoints, slopes and capacities in the
/// library use this type so that every threshold comparison is decided
/// without rounding ambiguity. Internally an int64 numerator/denominator
/// pair in lowest terms; intermediate products run through __int128 and
/// throw std::overflow_error instead of silently wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)

  Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    __int128 nn = n;
    __int128 dd = d;
    if (dd < 0) {
      nn = -nn;
      dd = -dd;
    }
    assign_reduced(nn, dd);
  }

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }
  [[nodiscard]] bool is_integer() const { return den_ == 1; }
  [[nodiscard]] bool is_negative() const { return num_ < 0; }
  [[nodiscard]] bool is_zero() const { return num_ == 0; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == 1 && b.den_ == 1) return from_int128(static_cast<__int128>(a.num_) + b.num_);
    Rational r;
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const __int128 den = static_cast<__int128>(a.den_ / g) * b.den_;
    const __int128 num =
        static_cast<__int128>(a.num_) * (b.den_ / g) + static_cast<__int128>(b.num_) * (a.den_ / g);
    r.assign_reduced(num, den);
    return r;
  }

  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.den_ == 1 && b.den_ == 1) return from_int128(static_cast<__int128>(a.num_) * b.num_);
    Rational r;
    r.assign_reduced(static_cast<__int128>(a.num_) * b.num_,
                     static_cast<__int128>(a.den_) * b.den_);
    return r;
  }

  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    Rational r;
    __int128 num = static_cast<__int128>(a.num_) * b.den_;
    __int128 den = static_cast<__int128>(a.den_) * b.num_;
    if (den < 0) {
      num = -num;
      den = -den;
    }
    r.assign_reduced(num, den);
    return r;
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  /// Largest integer <= *this.
  [[nodiscard]] std::int64_t floor() const {
    if (num_ >= 0) return num_ / den_;
    return -((-num_ + den_ - 1) / den_);
  }

  /// Smallest integer >= *this.
  [[nodiscard]] std::int64_t ceil() const { return -((-*this).floor()); }

  [[nodiscard]] Rational abs() const { return num_ < 0 ? -*this : *this; }

  [[nodiscard]] std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rational from_int128(__int128 v) {
    Rational r;
    r.num_ = narrow(v);
    r.den_ = 1;
    return r;
  }

  static std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Rational: overflow");
    return static_cast<std::int64_t>(v);
  }

  void assign_reduced(__int128 num, __int128 den) {
    const __int128 a = num < 0 ? -num : num;
    __int128 g = gcd128(a, den);
    if (g == 0) g = 1;  // num == 0, den normalized below
    num_ = narrow(num / g);
    den_ = narrow(den / g);
    if (num_ == 0) den_ = 1;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace flpath
