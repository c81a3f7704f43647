#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <vector>

#include "dqm/ddouble.hpp"
#include "dqm/errors.hpp"

namespace dqm {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Shifted factorials
// ---------------------------------------------------------------------------

// (a)_n = a(a+1)...(a+n-1), empty product for n = 0.
template <class T>
T pochhammer(const T& a, int n) {
  T r(1.0);
  T f = a;
  for (int k = 0; k < n; ++k) {
    r *= f;
    f += T(1.0);
  }
  return r;
}

// (a;q)_n = (1-a)(1-aq)...(1-aq^{n-1}), empty product for n = 0.
template <class T>
T q_pochhammer(const T& a, const T& q, int n) {
  T r(1.0);
  T aq = a;
  for (int k = 0; k < n; ++k) {
    r *= T(1.0) - aq;
    aq *= q;
  }
  return r;
}

inline double q_pochhammer_checked(double a, double q, int n) {
  if (!(q > 0.0 && q < 1.0)) throw parameter_error("q must lie in (0,1)");
  if (n < 0) throw parameter_error("q_pochhammer order must be non-negative");
  return q_pochhammer(a, q, n);
}

// (a;q)_infty, truncated once aq^k drops below roundoff.
inline cplx q_pochhammer_inf(cplx a, double q) {
  if (!(q > 0.0 && q < 1.0)) throw parameter_error("q must lie in (0,1)");
  cplx r(1.0, 0.0);
  cplx aq = a;
  for (int k = 0; k < 4000; ++k) {
    if (std::abs(aq) < 1e-19) break;
    r *= cplx(1.0, 0.0) - aq;
    aq *= q;
  }
  return r;
}

// ---------------------------------------------------------------------------
// log Gamma (principal branch), Lanczos g = 7
// ---------------------------------------------------------------------------

inline cplx log_gamma(cplx z) {
  static const double g = 7.0;
  static const double c[9] = {
      0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,  12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() == std::floor(z.real()) && z.real() <= 0.0 && z.imag() == 0.0)
    throw domain_error("log_gamma pole at non-positive integer");
  if (z.real() < 0.5) {
    // reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
    const double pi = 3.14159265358979323846;
    return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(cplx(1.0, 0.0) - z);
  }
  z -= 1.0;
  cplx x = c[0];
  for (int i = 1; i < 9; ++i) x += c[i] / (z + cplx(double(i), 0.0));
  cplx t = z + g + 0.5;
  const double half_log_two_pi = 0.91893853320467274178;
  return half_log_two_pi + (z + 0.5) * std::log(t) - t + std::log(x);
}

inline double log_gamma_real(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw domain_error("log_gamma pole at non-positive integer");
  return std::lgamma(x);
}

// ---------------------------------------------------------------------------
// Generic (q-)hypergeometric series
// ---------------------------------------------------------------------------

struct HypergeomSpec {
  std::vector<cplx> numerator_params;
  std::vector<cplx> denominator_params;
  cplx argument{0.0, 0.0};
  std::optional<double> q_base;  // set for rφs
};

namespace detail {

inline bool near_nonpositive_integer(cplx a, int* m) {
  double r = std::round(a.real());
  if (r <= 0.0 && std::abs(a.real() - r) < 1e-12 && std::abs(a.imag()) < 1e-12) {
    *m = static_cast<int>(-r);
    return true;
  }
  return false;
}

inline bool near_q_power(cplx a, double q, int* m) {
  // a = q^{-m}, m >= 0
  if (std::abs(a.imag()) > 1e-12 * std::abs(a) || a.real() <= 0.0) return false;
  double e = -std::log(a.real()) / std::log(q);
  double r = std::round(e);
  if (r >= 0.0 && std::abs(e - r) < 1e-10) {
    *m = static_cast<int>(r);
    return true;
  }
  return false;
}

}  // namespace detail

// Smallest termination order implied by the numerator parameters, or -1.
inline int hyp_termination_index(const HypergeomSpec& s) {
  int best = -1;
  for (const cplx& a : s.numerator_params) {
    int m;
    bool hit = s.q_base ? detail::near_q_power(a, *s.q_base, &m) : detail::near_nonpositive_integer(a, &m);
    if (hit && (best < 0 || m < best)) best = m;
  }
  return best;
}

// scalar helpers used by hyp_sum
inline double pow_like(double q, int k) { return std::pow(q, k); }
inline cplx pow_like(cplx q, int k) { return std::pow(q, k); }
inline DDouble pow_like(DDouble q, int k) { return pow_int(q, k); }
inline bool is_zero_like(double x) { return x == 0.0; }
inline bool is_zero_like(const cplx& x) { return std::abs(x) < 1e-300; }
inline bool is_zero_like(const DDouble& x) { return x.hi == 0.0; }

// Exact sum of the first n_terms+1 terms (k = 0..n_terms) of rFs or rφs,
// including the (-1)^{(1+s-r)k} q^{(1+s-r)k(k-1)/2} factor of the q-series.
template <class T>
T hyp_sum(const std::vector<T>& num, const std::vector<T>& den, const T& z, int n_terms,
          const T* q = nullptr) {
  const int r = static_cast<int>(num.size());
  const int s = static_cast<int>(den.size());
  const int e = 1 + s - r;
  T sum(1.0);
  T term(1.0);
  for (int k = 0; k < n_terms; ++k) {
    T ratio(1.0);
    if (q) {
      T qk = pow_like(*q, k);
      for (const T& a : num) ratio *= T(1.0) - a * qk;
      for (const T& b : den) {
        T f = T(1.0) - b * qk;
        if (is_zero_like(f)) throw domain_error("q-hypergeometric denominator factor vanishes");
        ratio /= f;
      }
      T qk1 = qk * (*q);
      T f = T(1.0) - qk1;  // (q;q) factorial piece
      ratio /= f;
      if (e != 0) {
        // extra factor ratio between consecutive terms: [(-1) q^{k}]^{e}
        T extra = pow_like(*q, k);
        for (int j = 0; j < std::abs(e); ++j) ratio *= (e > 0) ? -extra : T(-1.0) / extra;
      }
    } else {
      for (const T& a : num) ratio *= a + T(double(k));
      for (const T& b : den) {
        T f = b + T(double(k));
        if (is_zero_like(f)) throw domain_error("hypergeometric denominator parameter pole");
        ratio /= f;
      }
      ratio /= T(double(k + 1));
    }
    term *= ratio * z;
    sum += term;
  }
  return sum;
}

// Public evaluator: terminating series are detected structurally and summed
// exactly; otherwise partial sums run until |term| < tol*|sum| or max_terms.
inline cplx hypergeometric(const HypergeomSpec& spec, int max_terms = 400, double tol = 1e-16) {
  const int r = static_cast<int>(spec.numerator_params.size());
  const int s = static_cast<int>(spec.denominator_params.size());
  const int e = 1 + s - r;
  const int n_term = hyp_termination_index(spec);

  // denominator poles at or before the truncation index
  for (const cplx& b : spec.denominator_params) {
    int m;
    bool hit = spec.q_base ? detail::near_q_power(b, *spec.q_base, &m) : detail::near_nonpositive_integer(b, &m);
    if (hit && (n_term < 0 || m < n_term)) throw domain_error("denominator parameter pole before termination");
  }

  if (n_term >= 0) {
    if (spec.q_base) {
      cplx q(*spec.q_base, 0.0);
      return hyp_sum(spec.numerator_params, spec.denominator_params, spec.argument, n_term, &q);
    }
    return hyp_sum(spec.numerator_params, spec.denominator_params, spec.argument, n_term);
  }

  // non-terminating: adaptive partial sum
  cplx sum(1.0, 0.0), term(1.0, 0.0);
  for (int k = 0; k < max_terms; ++k) {
    cplx ratio(1.0, 0.0);
    if (spec.q_base) {
      double q = *spec.q_base;
      cplx qk = std::pow(q, k);
      for (const cplx& a : spec.numerator_params) ratio *= cplx(1.0, 0.0) - a * qk;
      for (const cplx& b : spec.denominator_params) ratio /= cplx(1.0, 0.0) - b * qk;
      ratio /= cplx(1.0, 0.0) - qk * q;
      for (int j = 0; j < std::abs(e); ++j) ratio *= (e > 0) ? -qk : cplx(-1.0, 0.0) / qk;
    } else {
      for (const cplx& a : spec.numerator_params) ratio *= a + double(k);
      for (const cplx& b : spec.denominator_params) ratio /= b + double(k);
      ratio /= double(k + 1);
    }
    term *= ratio * spec.argument;
    sum += term;
    if (std::abs(term) < tol * std::abs(sum)) return sum;
  }
  throw convergence_error("hypergeometric series did not converge within max_terms");
}

}  // namespace dqm
