#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "qmadapt/errors.hpp"

namespace qmadapt {

/// Exact fraction with a positive, fully reduced denominator.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw InputError("rational with zero denominator");
    normalize();
  }

  /// Parses "12", "-3/4" or a plain decimal such as "12.5".
  static Rational parse(std::string_view text) {
    auto fail = [&] { return InputError("not a rational number: '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      return Rational(parse_int(text.substr(0, slash), fail), parse_int(text.substr(slash + 1), fail));
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) return Rational(parse_int(text, fail));
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 12) throw fail();
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::string digits(text.substr(0, dot));
    bool negative = !digits.empty() && digits.front() == '-';
    std::int64_t whole = digits.empty() || digits == "-" ? 0 : parse_int(digits, fail);
    std::int64_t part = frac.empty() ? 0 : parse_int(frac, fail);
    if (part < 0) throw fail();
    std::int64_t num = std::llabs(whole) * den + part;
    return Rational(negative ? -num : num, den);
  }

  /// Closest fraction with denominator at most `max_den` (Stern-Brocot walk).
  static Rational approximate(double value, std::int64_t max_den = 1000000) {
    bool negative = value < 0;
    double x = negative ? -value : value;
    std::int64_t lo_n = 0, lo_d = 1, hi_n = 1, hi_d = 0;
    auto whole = static_cast<std::int64_t>(x);
    x -= static_cast<double>(whole);
    for (int i = 0; i < 64 && x > 1e-15; ++i) {
      double inv = 1.0 / x;
      auto a = static_cast<std::int64_t>(inv);
      std::int64_t n = a * hi_n + lo_n;
      std::int64_t d = a * hi_d + lo_d;
      if (d > max_den) break;
      lo_n = hi_n, lo_d = hi_d, hi_n = n, hi_d = d;
      x = inv - static_cast<double>(a);
    }
    Rational frac = hi_d == 0 ? Rational(0) : Rational(hi_n, hi_d);
    Rational result = Rational(whole) + frac;
    return negative ? -result : result;
  }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    std::int64_t g = std::gcd(a.den_, b.den_);
    return Rational(a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), a.den_ / g * b.den_);
  }
  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    std::int64_t g1 = std::gcd(a.num_, b.den_);
    std::int64_t g2 = std::gcd(b.num_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return Rational((a.num_ / g1) * (b.num_ / g2), (a.den_ / g2) * (b.den_ / g1));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw InputError("division by zero");
    return a * Rational(b.den_, b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    // Cross-multiplication in 128 bits so ordering never overflows.
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  template <typename Fail>
  static std::int64_t parse_int(std::string_view text, Fail fail) {
    std::string s(text);
    if (s.empty()) throw fail();
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') throw fail();
    return v;
  }

  void normalize() {
    if (den_ < 0) num_ = -num_, den_ = -den_;
    std::int64_t g = std::gcd(num_, den_);
    if (g > 1) num_ /= g, den_ /= g;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace qmadapt
