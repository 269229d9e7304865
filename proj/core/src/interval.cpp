#include "coulomb/interval.hpp"

#include <algorithm>
#include <array>
#include <ostream>

namespace coulomb {
namespace {

// Below this magnitude the FMA residual of a product or quotient may itself
// be inexact, so directed results fall back to an unconditional ulp step.
constexpr double kTiny = 0x1p-960;
// Accuracy assumed for the C library sin/cos, in ulps.
constexpr int kLibmUlps = 2;

[[noreturn]] void overflow() { throw DomainError("interval overflow"); }

inline double checked(double x) {
  if (!std::isfinite(x)) overflow();
  return x;
}

// TwoSum: the rounding error of a + b is exactly representable.
inline double add_down(double a, double b) {
  const double s = checked(a + b);
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err < 0.0 ? next_down(s) : s;
}

inline double add_up(double a, double b) {
  const double s = checked(a + b);
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err > 0.0 ? next_up(s) : s;
}

inline double mul_down(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = checked(a * b);
  if (std::fabs(p) < kTiny) return next_down(p);
  return std::fma(a, b, -p) < 0.0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = checked(a * b);
  if (std::fabs(p) < kTiny) return next_up(p);
  return std::fma(a, b, -p) > 0.0 ? next_up(p) : p;
}

// Sign of (a/b - q) equals sign(a - q*b) * sign(b); the FMA remainder is exact.
inline double div_down(double a, double b) {
  if (a == 0.0) return 0.0;
  const double q = checked(a / b);
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_down(q);
  const double r = std::fma(-q, b, a);
  const double s = (b > 0.0) ? r : -r;
  return s < 0.0 ? next_down(q) : q;
}

inline double div_up(double a, double b) {
  if (a == 0.0) return 0.0;
  const double q = checked(a / b);
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_up(q);
  const double r = std::fma(-q, b, a);
  const double s = (b > 0.0) ? r : -r;
  return s > 0.0 ? next_up(q) : q;
}

inline double widen_down(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_down(x);
  return x;
}

inline double widen_up(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_up(x);
  return x;
}

// True when some integer m gives offset + 4m inside [tlo, thi].
bool hits_lattice(double tlo, double thi, double offset) {
  const double m0 = std::floor((tlo - offset) / 4.0);
  for (double m = m0 - 1.0; m <= m0 + 2.0; m += 1.0) {
    const double t = offset + 4.0 * m;
    if (tlo <= t && t <= thi) return true;
  }
  return false;
}

// Shared body of sin and cos: `max_at`/`min_at` are the lattice offsets, in
// units of pi/2, of the function's maxima and minima.
template <class F>
Interval periodic(const Interval& a, F f, double max_at, double min_at) {
  const Interval half_pi = pi_interval() / Interval(2.0);
  const Interval t = a / half_pi;
  if (t.hi() - t.lo() >= 4.0) return {-1.0, 1.0};
  const double flo = f(a.lo());
  const double fhi = f(a.hi());
  double lo = widen_down(std::min(flo, fhi), kLibmUlps);
  double hi = widen_up(std::max(flo, fhi), kLibmUlps);
  if (hits_lattice(t.lo(), t.hi(), max_at)) hi = 1.0;
  if (hits_lattice(t.lo(), t.hi(), min_at)) lo = -1.0;
  return {std::max(lo, -1.0), std::min(hi, 1.0)};
}

}  // namespace

Interval::Interval(double x) : lo_(x), hi_(x) {
  if (!std::isfinite(x)) throw DomainError("non-finite interval endpoint");
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("non-finite interval endpoint");
  if (lo > hi) throw DomainError("interval with lo > hi");
}

double Interval::mid() const { return 0.5 * lo_ + 0.5 * hi_; }

double Interval::rad() const {
  const double m = mid();
  return next_up(std::max(hi_ - m, m - lo_));
}

double Interval::mig() const {
  if (contains_zero()) return 0.0;
  return std::min(std::fabs(lo_), std::fabs(hi_));
}

Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }
Interval& Interval::operator/=(const Interval& o) { return *this = *this / o; }

Interval operator+(const Interval& a, const Interval& b) {
  return Interval::unchecked(add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi()));
}

Interval operator-(const Interval& a, const Interval& b) {
  return Interval::unchecked(add_down(a.lo(), -b.hi()), add_up(a.hi(), -b.lo()));
}

Interval operator*(const Interval& a, const Interval& b) {
  const double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
  if (al >= 0.0) {
    if (bl >= 0.0) return Interval::unchecked(mul_down(al, bl), mul_up(ah, bh));
    if (bh <= 0.0) return Interval::unchecked(mul_down(ah, bl), mul_up(al, bh));
    return Interval::unchecked(mul_down(ah, bl), mul_up(ah, bh));
  }
  if (ah <= 0.0) {
    if (bl >= 0.0) return Interval::unchecked(mul_down(al, bh), mul_up(ah, bl));
    if (bh <= 0.0) return Interval::unchecked(mul_down(ah, bh), mul_up(al, bl));
    return Interval::unchecked(mul_down(al, bh), mul_up(al, bl));
  }
  // a straddles zero.
  if (bl >= 0.0) return Interval::unchecked(mul_down(al, bh), mul_up(ah, bh));
  if (bh <= 0.0) return Interval::unchecked(mul_down(ah, bl), mul_up(al, bl));
  return Interval::unchecked(std::min(mul_down(al, bh), mul_down(ah, bl)),
                             std::max(mul_up(al, bl), mul_up(ah, bh)));
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DomainError("division by an interval containing zero");
  const double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
  if (bl > 0.0) {
    if (al >= 0.0) return Interval::unchecked(div_down(al, bh), div_up(ah, bl));
    if (ah <= 0.0) return Interval::unchecked(div_down(al, bl), div_up(ah, bh));
    return Interval::unchecked(div_down(al, bl), div_up(ah, bl));
  }
  if (al >= 0.0) return Interval::unchecked(div_down(ah, bh), div_up(al, bl));
  if (ah <= 0.0) return Interval::unchecked(div_down(ah, bl), div_up(al, bh));
  return Interval::unchecked(div_down(ah, bh), div_up(al, bh));
}

Interval hull(const Interval& a, const Interval& b) {
  return Interval::unchecked(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Interval sqr(const Interval& a) {
  const double l = a.mig();
  const double h = a.mag();
  return Interval::unchecked(mul_down(l, l), mul_up(h, h));
}

Interval abs(const Interval& a) { return Interval::unchecked(a.mig(), a.mag()); }

Interval sqrt(const Interval& a) {
  if (a.lo() < 0.0) throw DomainError("sqrt of an interval with negative lower bound");
  double lo = std::sqrt(a.lo());
  double hi = std::sqrt(a.hi());
  // sqrt is correctly rounded; check the direction exactly via FMA.
  if (lo > 0.0 && std::fma(lo, lo, -a.lo()) > 0.0) lo = next_down(lo);
  if (std::fma(hi, hi, -a.hi()) < 0.0) hi = next_up(hi);
  return Interval::unchecked(std::max(lo, 0.0), hi);
}

Interval sin(const Interval& a) {
  return periodic(a, [](double x) { return std::sin(x); }, 1.0, 3.0);
}

Interval cos(const Interval& a) {
  return periodic(a, [](double x) { return std::cos(x); }, 0.0, 2.0);
}

Interval inv_pow3_2(const Interval& s) {
  if (s.lo() <= 0.0) throw DomainError("inverse 3/2 power of a non-positive interval");
  return Interval(1.0) / (s * sqrt(s));
}

Interval pi_interval() {
  // 0x1.921fb54442d18p+1 is the double immediately below pi.
  constexpr double kPiLo = 0x1.921fb54442d18p+1;
  constexpr double kPiHi = 0x1.921fb54442d19p+1;
  static_assert(kPiLo < kPiHi);
  return Interval::unchecked(kPiLo, kPiHi);
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  const auto prec = os.precision(17);
  os << '[' << x.lo() << ", " << x.hi() << ']';
  os.precision(prec);
  return os;
}

ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b) {
  return {a.re + b.re, a.im + b.im};
}

ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b) {
  return {a.re - b.re, a.im - b.im};
}

ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

Interval abs(const ComplexInterval& z) { return sqrt(sqr(z.re) + sqr(z.im)); }

}  // namespace coulomb
