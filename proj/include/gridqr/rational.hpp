#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gridqr {

/// Exact rational number used for cost accounting. All charges produced by
/// the cost model are small multiples of 1/k with k a product of grid
/// factors and the constant denominators 2, 3, 4, so int64 components with
/// 128-bit intermediates never come close to overflowing at the sizes this
/// simulator runs.
class Rat {
 public:
  constexpr Rat() = default;
  constexpr Rat(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rat(long long n, long long d) : num_(n), den_(d) {
    if (d == 0) throw std::invalid_argument("Rat: zero denominator");
    normalize();
  }

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::invalid_argument("Rat: division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rat operator-() const { return Rat(-num_, den_); }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

 private:
  using i128 = __int128;

  static Rat make(i128 n, i128 d) {
    if (d < 0) { n = -n; d = -d; }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rat: overflow");
    Rat r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }
  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }
  void normalize() {
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  long long num_ = 0;
  long long den_ = 1;
};

}  // namespace gridqr
