#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace dqm {

// Double-double scalar: an unevaluated sum hi+lo with |lo| <= ulp(hi)/2,
// giving ~31-32 significant decimal digits. Used for ill-conditioned
// Casoratian ratios and high-order ladder products.
struct DDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DDouble() = default;
  constexpr DDouble(double x) : hi(x), lo(0.0) {}
  constexpr DDouble(double h, double l) : hi(h), lo(l) {}

  explicit operator double() const { return hi + lo; }
};

namespace detail {

inline DDouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DDouble quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline DDouble two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace detail

inline DDouble operator+(const DDouble& a, const DDouble& b) {
  DDouble s = detail::two_sum(a.hi, b.hi);
  DDouble t = detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return detail::quick_two_sum(s.hi, s.lo);
}

inline DDouble operator-(const DDouble& a) { return {-a.hi, -a.lo}; }
inline DDouble operator-(const DDouble& a, const DDouble& b) { return a + (-b); }

inline DDouble operator*(const DDouble& a, const DDouble& b) {
  DDouble p = detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return detail::quick_two_sum(p.hi, p.lo);
}

inline DDouble operator/(const DDouble& a, const DDouble& b) {
  double q1 = a.hi / b.hi;
  DDouble r = a - DDouble(q1) * b;
  double q2 = r.hi / b.hi;
  r = r - DDouble(q2) * b;
  double q3 = r.hi / b.hi;
  DDouble q = detail::quick_two_sum(q1, q2);
  return q + DDouble(q3);
}

inline DDouble& operator+=(DDouble& a, const DDouble& b) { return a = a + b; }
inline DDouble& operator-=(DDouble& a, const DDouble& b) { return a = a - b; }
inline DDouble& operator*=(DDouble& a, const DDouble& b) { return a = a * b; }
inline DDouble& operator/=(DDouble& a, const DDouble& b) { return a = a / b; }

inline bool operator<(const DDouble& a, const DDouble& b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(const DDouble& a, const DDouble& b) { return b < a; }
inline bool operator==(const DDouble& a, const DDouble& b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(const DDouble& a, const DDouble& b) { return !(a == b); }
inline bool operator<=(const DDouble& a, const DDouble& b) { return !(b < a); }
inline bool operator>=(const DDouble& a, const DDouble& b) { return !(a < b); }

inline DDouble fabs(const DDouble& a) { return a.hi < 0.0 ? -a : a; }
inline double to_double(const DDouble& a) { return a.hi + a.lo; }
inline double to_double(double a) { return a; }

inline DDouble sqrt(const DDouble& a) {
  if (a.hi == 0.0 && a.lo == 0.0) return {};
  double x = 1.0 / std::sqrt(a.hi);
  double y = a.hi * x;
  DDouble corr = (a - DDouble(y) * DDouble(y)) * DDouble(x * 0.5);
  return DDouble(y) + corr;
}

inline DDouble pow_int(DDouble base, long long e) {
  bool inv = e < 0;
  unsigned long long n = inv ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
  DDouble r(1.0);
  while (n) {
    if (n & 1ull) r *= base;
    base *= base;
    n >>= 1;
  }
  return inv ? DDouble(1.0) / r : r;
}

// Complex double-double, for series whose terms cancel past double range.
struct CDDouble {
  DDouble re, im;
  constexpr CDDouble() = default;
  CDDouble(double r) : re(r), im(0.0) {}
  CDDouble(const DDouble& r) : re(r), im(0.0) {}
  CDDouble(const DDouble& r, const DDouble& i) : re(r), im(i) {}
  CDDouble(const std::complex<double>& z) : re(z.real()), im(z.imag()) {}
  std::complex<double> to_cplx() const { return {to_double(re), to_double(im)}; }
};

inline CDDouble operator+(const CDDouble& a, const CDDouble& b) { return {a.re + b.re, a.im + b.im}; }
inline CDDouble operator-(const CDDouble& a, const CDDouble& b) { return {a.re - b.re, a.im - b.im}; }
inline CDDouble operator-(const CDDouble& a) { return {-a.re, -a.im}; }
inline CDDouble operator*(const CDDouble& a, const CDDouble& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CDDouble operator/(const CDDouble& a, const CDDouble& b) {
  DDouble m = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / m, (a.im * b.re - a.re * b.im) / m};
}
inline CDDouble& operator+=(CDDouble& a, const CDDouble& b) { return a = a + b; }
inline CDDouble& operator-=(CDDouble& a, const CDDouble& b) { return a = a - b; }
inline CDDouble& operator*=(CDDouble& a, const CDDouble& b) { return a = a * b; }
inline CDDouble& operator/=(CDDouble& a, const CDDouble& b) { return a = a / b; }
inline double abs_approx(const CDDouble& a) {
  return std::hypot(to_double(a.re), to_double(a.im));
}

}  // namespace dqm
