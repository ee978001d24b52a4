#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cat0bd {

/// Exact rational number over 64-bit integers.
///
/// Intermediate products are formed in 128 bits and reduced; a result that
/// does not fit back into 64 bits throws std::overflow_error instead of
/// wrapping. Integral operands take a gcd-free path.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  Rational operator-() const {
    if (num_ == std::numeric_limits<std::int64_t>::min()) overflow();
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator+(const Rational& x, const Rational& y) {
    if (x.den_ == 1 && y.den_ == 1) return from_wide(wide(x.num_) + y.num_, 1);
    return from_wide(wide(x.num_) * y.den_ + wide(y.num_) * x.den_,
                     wide(x.den_) * y.den_);
  }
  friend Rational operator-(const Rational& x, const Rational& y) {
    if (x.den_ == 1 && y.den_ == 1) return from_wide(wide(x.num_) - y.num_, 1);
    return from_wide(wide(x.num_) * y.den_ - wide(y.num_) * x.den_,
                     wide(x.den_) * y.den_);
  }
  friend Rational operator*(const Rational& x, const Rational& y) {
    if (x.den_ == 1 && y.den_ == 1) return from_wide(wide(x.num_) * y.num_, 1);
    return from_wide(wide(x.num_) * y.num_, wide(x.den_) * y.den_);
  }
  friend Rational operator/(const Rational& x, const Rational& y) {
    if (y.num_ == 0) throw std::domain_error("Rational: division by zero");
    return from_wide(wide(x.num_) * y.den_, wide(x.den_) * y.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& x, const Rational& y) {
    return x.num_ == y.num_ && x.den_ == y.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
    if (x.den_ == y.den_) return x.num_ <=> y.num_;
    return wide(x.num_) * y.den_ <=> wide(y.num_) * x.den_;
  }

  /// "p/q" always, including integers ("3/1") and zero ("0/1").
  std::string to_string() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "p", "p/q", with optional sign on p.
  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    auto slash = text.find('/');
    auto parse_int = [&](std::string_view s) -> std::int64_t {
      s = trim(s);
      if (s.empty()) throw std::invalid_argument("bad rational: '" + std::string(text) + "'");
      std::size_t pos = 0;
      std::int64_t v = 0;
      try {
        v = std::stoll(std::string(s), &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad rational: '" + std::string(text) + "'");
      }
      if (pos != s.size()) throw std::invalid_argument("bad rational: '" + std::string(text) + "'");
      return v;
    };
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    auto d = parse_int(text.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("bad rational: zero denominator");
    return Rational(parse_int(text.substr(0, slash)), d);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

 private:
  using wide_t = __int128;
  static wide_t wide(std::int64_t v) { return static_cast<wide_t>(v); }

  [[noreturn]] static void overflow() {
    throw std::overflow_error("Rational: 64-bit overflow");
  }

  static wide_t wide_gcd(wide_t a, wide_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      wide_t t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static bool fits(wide_t v) {
    return v >= wide(std::numeric_limits<std::int64_t>::min() + 1) &&
           v <= wide(std::numeric_limits<std::int64_t>::max());
  }

  static Rational from_wide(wide_t n, wide_t d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (d != 1) {
      wide_t g;
      if (fits(n) && fits(d)) {
        g = std::gcd(static_cast<std::int64_t>(n < 0 ? -n : n), static_cast<std::int64_t>(d));
      } else {
        g = wide_gcd(n, d);
      }
      if (g > 1) {
        n /= g;
        d /= g;
      }
    }
    if (n == 0) d = 1;
    if (!fits(n) || !fits(d)) overflow();
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  void assign(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    *this = from_wide(wide(n), wide(d));
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Simplest rational (smallest denominator, then smallest magnitude) in the
/// closed interval [lo, hi]. Continued-fraction descent on doubles.
inline Rational simplest_between(double lo, double hi, int depth = 0) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("simplest_between: empty or infinite interval");
  if (lo <= 0.0 && hi >= 0.0) return Rational(0);
  if (hi < 0.0) return -simplest_between(-hi, -lo, depth);
  double c = std::ceil(lo);
  if (c <= hi) return Rational(static_cast<std::int64_t>(c));
  if (depth > 40) throw std::overflow_error("simplest_between: interval too narrow");
  double f = std::floor(lo);
  Rational inner = simplest_between(1.0 / (hi - f), 1.0 / (lo - f), depth + 1);
  return Rational(static_cast<std::int64_t>(f)) + Rational(1) / inner;
}

/// Smallest multiple of `step` that is >= sqrt(value_sq).
inline Rational ceil_sqrt_on_grid(const Rational& value_sq, const Rational& step) {
  if (value_sq.sign() <= 0) return Rational(0);
  auto k = static_cast<std::int64_t>(std::floor(std::sqrt(value_sq.to_double()) / step.to_double()));
  if (k > 0) --k;
  while ((step * k) * (step * k) < value_sq) ++k;
  return step * k;
}

}  // namespace cat0bd
