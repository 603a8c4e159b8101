#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dyadlab {

/// Exact dyadic rational num / 2^log2_den, kept normalized (num odd, or
/// num == 0 with log2_den == 0). Interval measures and every quantity built
/// from them by addition stay in this class, so measure comparisons are exact.
class DyadRat {
 public:
  constexpr DyadRat() = default;

  DyadRat(std::int64_t num, int log2_den) : num_(num), log2_den_(log2_den) {
    if (log2_den < 0) throw std::invalid_argument("DyadRat: negative denominator exponent");
    normalize();
  }

  static DyadRat from_int(std::int64_t n) { return DyadRat(n, 0); }

  /// 2^e for e of either sign.
  static DyadRat pow2(int e) {
    if (e >= 0) return DyadRat(std::int64_t{1} << e, 0);
    return DyadRat(1, -e);
  }

  std::int64_t num() const { return num_; }
  int log2_den() const { return log2_den_; }

  bool is_zero() const { return num_ == 0; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(std::int64_t{1} << log2_den_); }

  DyadRat operator+(const DyadRat& o) const {
    const int e = std::max(log2_den_, o.log2_den_);
    return DyadRat((num_ << (e - log2_den_)) + (o.num_ << (e - o.log2_den_)), e);
  }
  DyadRat operator-(const DyadRat& o) const {
    const int e = std::max(log2_den_, o.log2_den_);
    return DyadRat((num_ << (e - log2_den_)) - (o.num_ << (e - o.log2_den_)), e);
  }
  DyadRat& operator+=(const DyadRat& o) { return *this = *this + o; }

  /// Multiply by 2^e (exact; e of either sign).
  DyadRat times_pow2(int e) const {
    if (num_ == 0) return DyadRat();
    if (e >= log2_den_) return DyadRat(num_ << (e - log2_den_), 0);
    return DyadRat(num_, log2_den_ - e);
  }

  bool operator==(const DyadRat& o) const { return num_ == o.num_ && log2_den_ == o.log2_den_; }
  bool operator<(const DyadRat& o) const {
    const int e = std::max(log2_den_, o.log2_den_);
    return (num_ << (e - log2_den_)) < (o.num_ << (e - o.log2_den_));
  }
  bool operator<=(const DyadRat& o) const { return *this < o || *this == o; }
  bool operator>(const DyadRat& o) const { return o < *this; }
  bool operator>=(const DyadRat& o) const { return o <= *this; }

  std::string str() const {
    if (log2_den_ == 0) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(std::int64_t{1} << log2_den_);
  }

 private:
  void normalize() {
    if (num_ == 0) {
      log2_den_ = 0;
      return;
    }
    while (log2_den_ > 0 && (num_ & 1) == 0) {
      num_ >>= 1;
      --log2_den_;
    }
  }

  std::int64_t num_ = 0;
  int log2_den_ = 0;
};

/// General exact rational. Used for ratios of dyadic quantities (Semenov
/// ratios, Carleson distortion) whose quotients leave the dyadic class.
class Rational {
 public:
  constexpr Rational() = default;

  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  static Rational from_int(std::int64_t n) { return Rational(n, 1); }

  /// a / b as an exact rational.
  static Rational ratio(const DyadRat& a, const DyadRat& b) {
    if (b.is_zero()) throw std::invalid_argument("Rational: zero denominator");
    // (na/2^ea) / (nb/2^eb) = na*2^eb / (nb*2^ea)
    const int e = std::max(a.log2_den(), b.log2_den());
    return Rational(a.num() << (e - a.log2_den()), b.num() << (e - b.log2_den()));
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator<(const Rational& o) const {
    return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
  }
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace dyadlab
