#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace reeb {

/// Exact rational number. All heights, deltas and thresholds in the library
/// are of this type; nothing is ever rounded. Kept in reduced form with a
/// positive denominator.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(long num) : v_(num) {}
  Rat(long num, long den) : v_(num, den) {
    if (den == 0) throw std::invalid_argument("Rat: zero denominator");
    v_.canonicalize();
  }
  explicit Rat(const mpq_class& q) : v_(q) { v_.canonicalize(); }
  explicit Rat(const std::string& s) : v_(s) { v_.canonicalize(); }

  static Rat from_strings(const std::string& num, const std::string& den) {
    mpq_class q{mpz_class(num), mpz_class(den)};
    if (q.get_den() == 0) throw std::invalid_argument("Rat: zero denominator");
    q.canonicalize();
    return Rat(q);
  }

  Rat operator+(const Rat& o) const { return Rat(mpq_class(v_ + o.v_)); }
  Rat operator-(const Rat& o) const { return Rat(mpq_class(v_ - o.v_)); }
  Rat operator*(const Rat& o) const { return Rat(mpq_class(v_ * o.v_)); }
  Rat operator/(const Rat& o) const {
    if (o.v_ == 0) throw std::invalid_argument("Rat: division by zero");
    return Rat(mpq_class(v_ / o.v_));
  }
  Rat operator-() const { return Rat(mpq_class(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }

  Rat half() const { return Rat(mpq_class(v_ / 2)); }
  Rat abs() const { return v_ < 0 ? Rat(mpq_class(-v_)) : *this; }

  bool operator==(const Rat& o) const { return v_ == o.v_; }
  bool operator!=(const Rat& o) const { return v_ != o.v_; }
  bool operator<(const Rat& o) const { return v_ < o.v_; }
  bool operator<=(const Rat& o) const { return v_ <= o.v_; }
  bool operator>(const Rat& o) const { return v_ > o.v_; }
  bool operator>=(const Rat& o) const { return v_ >= o.v_; }

  int sign() const { return sgn(v_); }

  std::string num_string() const { return v_.get_num().get_str(); }
  std::string den_string() const { return v_.get_den().get_str(); }

  /// Numerator/denominator as int64 when they fit; throws otherwise.
  /// The JSON formats store heights as [int, int].
  std::pair<std::int64_t, std::int64_t> to_int64_pair() const {
    if (!v_.get_num().fits_slong_p() || !v_.get_den().fits_slong_p())
      throw std::overflow_error("Rat: value does not fit in int64 JSON encoding");
    return {v_.get_num().get_si(), v_.get_den().get_si()};
  }

  /// "3", "-1/2", ... Used by diagnostics and DOT output.
  std::string str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  double to_double() const { return v_.get_d(); }

  std::size_t hash() const {
    std::hash<std::string> h;
    return h(v_.get_num().get_str()) * 1000003u ^ h(v_.get_den().get_str());
  }

 private:
  mpq_class v_;
};

inline Rat min(const Rat& a, const Rat& b) { return a <= b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a >= b ? a : b; }
inline Rat mid(const Rat& a, const Rat& b) { return (a + b).half(); }

/// Closed interval [lo, hi], lo <= hi. Radius-delta windows I_delta(t) are
/// built with Interval::around.
struct Interval {
  Rat lo, hi;
  Interval() = default;
  Interval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
    if (hi < lo) throw std::invalid_argument("Interval: hi < lo");
  }
  static Interval around(const Rat& t, const Rat& radius) {
    return Interval(t - radius, t + radius);
  }
  bool contains(const Rat& t) const { return lo <= t && t <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  Rat width() const { return hi - lo; }
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
  std::string str() const { return "[" + lo.str() + ", " + hi.str() + "]"; }
};

}  // namespace reeb

template <>
struct std::hash<reeb::Rat> {
  std::size_t operator()(const reeb::Rat& r) const { return r.hash(); }
};
