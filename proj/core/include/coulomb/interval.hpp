#pragma once

// Scalar interval arithmetic with outward rounding.
//
// Rounding model: every floating-point operation is carried out in the
// default round-to-nearest mode and the computed bound is then pushed one
// unit in the last place outward (next_down / next_up). Since a correctly
// rounded result is within half an ulp of the exact value, the widened bound
// encloses the exact result. No floating-point environment state is read or
// modified, so the scheme is identical on every thread.
//
// Elementary functions (sqrt, sin, cos) rely on the C library; sqrt is
// correctly rounded by IEEE 754, sin/cos are widened by kLibmUlps ulps to
// cover the documented accuracy of glibc.

#include <bit>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>

#include "coulomb/errors.hpp"

namespace coulomb {

inline double next_up(double x) {
  if (x != x || x == std::numeric_limits<double>::infinity()) return x;
  if (x == 0.0) return std::numeric_limits<double>::denorm_min();
  auto bits = std::bit_cast<std::uint64_t>(x);
  bits += (x > 0.0) ? 1 : std::uint64_t(-1);
  return std::bit_cast<double>(bits);
}

inline double next_down(double x) { return -next_up(-x); }

class Interval {
 public:
  constexpr Interval() = default;

  // Point interval; NaN and infinities are rejected.
  Interval(double x);  // NOLINT(google-explicit-constructor)

  Interval(double lo, double hi);

  // Enclosure of a decimal or rational value that may not be representable.
  static Interval around(double x) { return {next_down(x), next_up(x)}; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const;
  // Upper bound of the radius |x - mid()| over the interval.
  double rad() const;
  double width() const { return next_up(hi_ - lo_); }
  // Upper bound of max |x|.
  double mag() const { return std::fmax(std::fabs(lo_), std::fabs(hi_)); }
  // Lower bound of min |x|.
  double mig() const;

  bool is_point() const { return lo_ == hi_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool intersects(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

  // Strict comparisons that hold for every pair of members.
  bool certainly_less(const Interval& o) const { return hi_ < o.lo_; }
  bool certainly_greater(const Interval& o) const { return lo_ > o.hi_; }

  Interval operator-() const { return unchecked(-hi_, -lo_); }

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);

  friend bool operator==(const Interval&, const Interval&) = default;

  // Construct without validation; callers guarantee lo <= hi and finiteness.
  static Interval unchecked(double lo, double hi) {
    Interval r;
    r.lo_ = lo;
    r.hi_ = hi;
    return r;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);

Interval hull(const Interval& a, const Interval& b);
Interval sqr(const Interval& a);
Interval abs(const Interval& a);
Interval sqrt(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
// s^(-3/2) for s > 0; the kernel of every inverse-cube distance term.
Interval inv_pow3_2(const Interval& s);

// Certified enclosure of pi (two adjacent doubles).
Interval pi_interval();

std::ostream& operator<<(std::ostream& os, const Interval& x);

/// Rectangular complex enclosure.
struct ComplexInterval {
  Interval re;
  Interval im;

  bool contains(double x, double y) const { return re.contains(x) && im.contains(y); }
};

ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b);
ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b);
// Enclosure of |z|.
Interval abs(const ComplexInterval& z);

}  // namespace coulomb
