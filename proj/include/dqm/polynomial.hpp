#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "dqm/family.hpp"
#include "dqm/linalg.hpp"

namespace dqm {

// ---------------------------------------------------------------------------
// Dense polynomial helpers (coefficients low power first)
// ---------------------------------------------------------------------------

using Poly = std::vector<double>;
template <class T>
using PolyT = std::vector<T>;

template <class T>
PolyT<T> poly_add(const PolyT<T>& a, const PolyT<T>& b) {
  PolyT<T> r(std::max(a.size(), b.size()), T(0.0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

template <class T>
PolyT<T> poly_scale(PolyT<T> a, const T& s) {
  for (T& c : a) c *= s;
  return a;
}
inline Poly poly_scale(Poly a, double s) {
  for (double& c : a) c *= s;
  return a;
}

template <class T>
PolyT<T> poly_mul(const PolyT<T>& a, const PolyT<T>& b) {
  if (a.empty() || b.empty()) return {};
  PolyT<T> r(a.size() + b.size() - 1, T(0.0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

template <class T>
PolyT<T> poly_derivative(const PolyT<T>& a) {
  if (a.size() <= 1) return {T(0.0)};
  PolyT<T> r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * T(double(i));
  return r;
}

template <class T>
T poly_eval(const Poly& a, const T& x) {
  T r(0.0);
  for (int i = int(a.size()) - 1; i >= 0; --i) r = r * x + T(a[i]);
  return r;
}

inline Poly to_double_poly(const PolyT<DDouble>& a) {
  Poly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = to_double(a[i]);
  return r;
}

inline Poly hermite_poly_coeffs(int n) {
  Poly pm1 = {1.0}, p = {0.0, 2.0};
  if (n == 0) return pm1;
  for (int k = 1; k < n; ++k) {
    Poly next = poly_add(poly_mul(Poly{0.0, 2.0}, p), poly_scale(pm1, -2.0 * k));
    pm1 = p;
    p = next;
  }
  return p;
}

// series coefficients; stays defined at degenerate parameter points where
// the three-term recurrence divides by zero (twisted parameters can land on
// n + al + be + 1 = 0, where the degree genuinely drops)
inline Poly laguerre_poly_coeffs(int n, double al) {
  Poly out(n + 1, 0.0);
  double pref = pochhammer(al + 1.0, n);
  for (int j = 2; j <= n; ++j) pref /= double(j);
  double term = 1.0;
  for (int k = 0; k <= n; ++k) {
    out[k] = pref * term;
    term *= (double(-n) + k) / ((al + 1.0 + k) * (k + 1.0));
  }
  return out;
}

inline Poly jacobi_poly_coeffs(int n, double al, double be) {
  // ((al+1)_n / n!) 2F1(-n, n+al+be+1; al+1; (1-z)/2) expanded in z
  double pref = pochhammer(al + 1.0, n);
  for (int j = 2; j <= n; ++j) pref /= double(j);
  Poly out(n + 1, 0.0);
  double coef = pref;
  Poly pw = {1.0};  // ((1-z)/2)^k
  for (int k = 0; k <= n; ++k) {
    for (size_t t = 0; t < pw.size(); ++t) out[t] += coef * pw[t];
    coef *= (double(-n) + k) * (double(n) + al + be + 1.0 + k) / ((al + 1.0 + k) * (k + 1.0));
    pw = poly_mul(pw, Poly{0.5, -0.5});
  }
  return out;
}

// Classical oQM eigenpolynomials as coefficient vectors in eta.
inline Poly oqm_poly_coeffs(const Family& fam, int n) {
  switch (fam.id()) {
    case FamilyId::H: return hermite_poly_coeffs(n);
    case FamilyId::L: return laguerre_poly_coeffs(n, fam.par("g") - 0.5);
    case FamilyId::J: return jacobi_poly_coeffs(n, fam.par("g") - 0.5, fam.par("h") - 0.5);
    default: throw domain_error("coefficient polynomials are oQM only");
  }
}

// ---------------------------------------------------------------------------
// Three-term recurrence coefficients
// ---------------------------------------------------------------------------

struct RecurrenceCoeffs {
  std::vector<double> A, B, C;  // indexed by n
  int n_max() const { return int(A.size()) - 1; }
};

// rdQM closed forms from the closure data.
inline RecurrenceCoeffs recurrence_coeffs_rdqm(const Family& fam, int n_max) {
  if (fam.category() != Category::rdQM) throw domain_error("rdQM recurrence needs an rdQM family");
  ClosureData cd = fam.closure();
  RecurrenceCoeffs rc;
  rc.A.resize(n_max + 1);
  rc.B.resize(n_max + 1);
  rc.C.resize(n_max + 1);
  double eta1 = fam.eta(1.0), b0 = fam.B(0.0);
  for (int n = 0; n <= n_max; ++n) {
    if (n == 0) {
      rc.A[0] = cd.Rm1(0.0) / cd.R0(0.0);
      rc.C[0] = 0.0;
    } else {
      double en = fam.energy(n);
      double ap = alpha_plus(cd, en), am = alpha_minus(cd, en);
      if (std::abs(ap - am) < 1e-12 * std::max(1.0, std::abs(ap)))
        throw degeneracy_error("alpha_+ = alpha_- on the spectrum");
      rc.A[n] = (cd.Rm1(en) + eta1 * (en - b0) * ap) / (ap * (ap - am));
      rc.C[n] = (cd.Rm1(en) + eta1 * (en - b0) * am) / (am * (am - ap));
    }
    rc.B[n] = -(rc.A[n] + rc.C[n]);
  }
  return rc;
}

struct SampledRecurrence {
  double A = 0.0, B = 0.0, C = 0.0;
  double fit_residual = 0.0;
};

// Least-squares extraction of (A_n, B_n, C_n) from sampled values of
// eta P_n = A P_{n+1} + B P_n + C P_{n-1}; the oracle for oQM/idQM where no
// closed forms are listed.
inline SampledRecurrence recurrence_from_samples(const Family& fam, int n, int n_points = 7) {
  if (n_points < 4) throw parameter_error("need at least 4 sample points");
  std::vector<double> xs;
  switch (fam.category()) {
    case Category::rdQM:
      for (int k = 0; k < n_points; ++k) xs.push_back(double(k));
      break;
    case Category::oQM:
      if (fam.id() == FamilyId::H)
        xs = chebyshev_points(n_points, -2.0, 2.0);
      else if (fam.id() == FamilyId::L)
        xs = chebyshev_points(n_points, 0.3, 2.2);
      else
        xs = chebyshev_points(n_points, 0.15, 1.4);
      break;
    case Category::idQM:
      if (fam.id() == FamilyId::AW)
        xs = chebyshev_points(n_points, 0.3, 2.8);
      else
        xs = chebyshev_points(n_points, 0.2, 2.4);
      break;
  }
  DMat m(n_points, 3);
  std::vector<double> rhs(n_points);
  double scale = 0.0;
  for (int k = 0; k < n_points; ++k) {
    double x = xs[k];
    m(k, 0) = fam.P(n + 1, x);
    m(k, 1) = fam.P(n, x);
    m(k, 2) = (n >= 1) ? fam.P(n - 1, x) : 0.0;
    rhs[k] = fam.eta(x) * fam.P(n, x);
    scale = std::max(scale, std::abs(rhs[k]));
  }
  if (n == 0) {
    // two unknowns only; C_0 = 0
    DMat m2(n_points, 2);
    for (int k = 0; k < n_points; ++k) {
      m2(k, 0) = m(k, 0);
      m2(k, 1) = m(k, 1);
    }
    double res;
    auto sol = solve_least_squares(m2, rhs, &res);
    return {sol[0], sol[1], 0.0, res / std::max(scale, 1e-30)};
  }
  double res;
  auto sol = solve_least_squares(m, rhs, &res);
  return {sol[0], sol[1], sol[2], res / std::max(scale, 1e-30)};
}

// Forward recursion from P_{-1} = 0, P_0 = 1.
inline double eval_via_recurrence(const RecurrenceCoeffs& rc, int n, double eta_value) {
  double pm1 = 0.0, p = 1.0;
  for (int k = 0; k < n; ++k) {
    double next = ((eta_value - rc.B[k]) * p - rc.C[k] * pm1) / rc.A[k];
    pm1 = p;
    p = next;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Forward/backward shift operators and the Rodrigues ladder
// ---------------------------------------------------------------------------

using GridFn = std::function<double(double)>;

// rdQM forward shift: F(lambda) f (x) = B(0) [f(x) - f(x+1)] / varphi(x)
inline GridFn forward_shift_rdqm(const Family& fam, GridFn f) {
  return [fam, f](double x) {
    return fam.B(0.0) * (f(x) - f(x + 1.0)) / fam.varphi(x);
  };
}

// rdQM backward shift: B(lambda) f (x) = [B(x) varphi(x) f(x) - D(x) varphi(x-1) f(x-1)] / B(0)
inline GridFn backward_shift_rdqm(const Family& fam, GridFn f) {
  return [fam, f](double x) {
    return (fam.B(x) * fam.varphi(x) * f(x) - fam.D(x) * fam.varphi(x - 1.0) * f(x - 1.0)) /
           fam.B(0.0);
  };
}

// P_n by the Rodrigues ladder (rdQM): apply B(lambda)...B(lambda+(n-1)delta)
// to 1 and divide by the product of b-coefficients (all 1 in rdQM). The
// innermost rung acts on the constant, so the deepest parameter shift that
// actually needs a Family object is lambda+(n-1)delta. Rungs run in
// double-double; the chain cancels heavily on the lattice at moderate n.
using GridFnDD = std::function<DDouble(const DDouble&)>;

inline GridFnDD rodrigues_lattice_dd(const Family& fam, int n) {
  if (n == 0) return [](const DDouble&) { return DDouble(1.0); };
  GridFnDD inner = (n == 1) ? GridFnDD([](const DDouble&) { return DDouble(1.0); })
                            : rodrigues_lattice_dd(fam.shifted(1), n - 1);
  DDouble b(fam.b_coeff(n));
  return [fam, inner, b](const DDouble& x) {
    DDouble xm1 = x - DDouble(1.0);
    return (fam.B_t(x) * fam.varphi_t(x) * inner(x) -
            fam.D_t(x) * fam.varphi_t(xm1) * inner(xm1)) /
           (fam.B_t(DDouble(0.0)) * b);
  };
}

inline GridFn rodrigues_lattice(const Family& fam, int n) {
  GridFnDD f = rodrigues_lattice_dd(fam, n);
  return [f](double x) { return to_double(f(DDouble(x))); };
}

// oQM ladder in coefficient space: B(lambda) u = -4/cF (c2 u' + c1 u).
// Done in double-double: the rung arithmetic is exact polynomial algebra but
// the coefficients grow, and the ladder must stay at 1e-9 against the series.
template <class T>
PolyT<T> backward_shift_oqm_t(const Family& fam, const PolyT<T>& u) {
  PolyT<T> c2, c1;
  switch (fam.id()) {
    case FamilyId::H:
      c2 = {T(0.25)};
      c1 = {T(0.0), T(-0.5)};
      break;
    case FamilyId::L:
      c2 = {T(0.0), T(1.0)};
      c1 = {T(fam.par("g") + 0.5), T(-1.0)};
      break;
    case FamilyId::J: {
      double g = fam.par("g"), h = fam.par("h");
      c2 = {T(1.0), T(0.0), T(-1.0)};
      c1 = {T(h - g), T(-(g + h + 1.0))};
      break;
    }
    default: throw domain_error("oQM backward shift needs an oQM family");
  }
  PolyT<T> r = poly_add(poly_mul(c2, poly_derivative(u)), poly_mul(c1, u));
  return poly_scale(r, T(-4.0 / fam.cF()));
}

inline PolyT<DDouble> rodrigues_oqm_dd(const Family& fam, int n) {
  if (n == 0) return {DDouble(1.0)};
  PolyT<DDouble> inner =
      (n == 1) ? PolyT<DDouble>{DDouble(1.0)} : rodrigues_oqm_dd(fam.shifted(1), n - 1);
  return poly_scale(backward_shift_oqm_t(fam, inner), DDouble(1.0) / DDouble(fam.b_coeff(n)));
}

inline Poly rodrigues_oqm_coeffs(const Family& fam, int n) {
  return to_double_poly(rodrigues_oqm_dd(fam, n));
}

inline Poly backward_shift_oqm(const Family& fam, const Poly& u) {
  return backward_shift_oqm_t(fam, u);
}

// idQM helpers: complex continuation of the auxiliary function
inline cplx varphi_c(const Family& fam, cplx x) {
  switch (fam.id()) {
    case FamilyId::MP: return 1.0;
    case FamilyId::W: return 2.0 * x;
    case FamilyId::AW: return 2.0 * std::sin(x);
    default: throw domain_error("varphi_c is idQM only");
  }
}

// Node set for idQM polynomials-in-eta: x points whose eta values are
// Chebyshev on a fixed window.
inline std::vector<double> idqm_eta_nodes(const Family& fam, int count) {
  // windows chosen wide: the ladder evaluates off the real axis, where the
  // ellipse amplification is set by the shift over the window half-width
  switch (fam.id()) {
    case FamilyId::MP: return chebyshev_points(count, -8.0, 8.0);
    case FamilyId::W: return chebyshev_points(count, 0.02, 40.0);
    case FamilyId::AW: return chebyshev_points(count, 0.02, 1.98);
    default: throw domain_error("idqm nodes need an idQM family");
  }
}

inline double idqm_x_of_eta(const Family& fam, double eta) {
  switch (fam.id()) {
    case FamilyId::MP: return eta;
    case FamilyId::W: return std::sqrt(eta);
    case FamilyId::AW: return std::acos(1.0 - eta);
    default: throw domain_error("idqm nodes need an idQM family");
  }
}

// idQM backward shift on a barycentric representation in eta; the result has
// degree deg+1 and lives on the same (sufficiently large) node set. Values
// are kept in double-double, and every rung ingredient (V, the auxiliary
// function, the shifted eta) is built algebraically in double-double from
// exact inputs: off-interval evaluation amplifies node noise by the ellipse
// factor, compounding over rungs, so double-rounded ingredients are not
// good enough at the top of the ladder.
using BaryDD = BarycentricT<DDouble>;

struct IdqmRungData {
  CDDouble V, Vs, phim, phip, em, ep;
};

// Rung ingredients at parameters lambda + s*delta, built in double-double
// directly from the base family so the parameter chain never rounds.
inline IdqmRungData idqm_rung_data(const Family& base, int s, double eta_node) {
  IdqmRungData d;
  const DDouble one(1.0);
  switch (base.id()) {
    case FamilyId::MP: {
      DDouble x(eta_node);
      DDouble a = DDouble(base.par("a")) + DDouble(0.5 * s);
      d.V = CDDouble(a, x);        // a + ix
      d.Vs = CDDouble(a, -x);
      d.phim = d.phip = CDDouble(1.0);
      d.em = CDDouble(x, DDouble(-0.5));
      d.ep = CDDouble(x, DDouble(0.5));
      break;
    }
    case FamilyId::W: {
      DDouble x = sqrt(DDouble(eta_node));
      CDDouble ix(DDouble(0.0), x);
      CDDouble num(1.0), nums(1.0);
      for (const char* k : {"a1", "a2", "a3", "a4"}) {
        DDouble aj = DDouble(base.par(k)) + DDouble(0.5 * s);
        num *= CDDouble(aj) + ix;
        nums *= CDDouble(aj) - ix;
      }
      CDDouble two_ix = CDDouble(2.0) * ix;
      d.V = num / (two_ix * (two_ix + CDDouble(1.0)));
      d.Vs = nums / ((-two_ix) * (CDDouble(1.0) - two_ix));
      d.phim = CDDouble(DDouble(2.0) * x, DDouble(-1.0));  // 2(x - i/2)
      d.phip = CDDouble(DDouble(2.0) * x, DDouble(1.0));
      DDouble re = x * x - DDouble(0.25);
      d.em = CDDouble(re, -x);  // (x - i/2)^2
      d.ep = CDDouble(re, x);
      break;
    }
    case FamilyId::AW: {
      double q = base.q();
      DDouble c = one - DDouble(eta_node);     // cos x
      DDouble sn = sqrt(one - c * c);          // sin x, positive on (0,pi)
      CDDouble z(c, sn);                       // e^{ix}
      DDouble rq = sqrt(DDouble(q));
      DDouble rqs = pow_int(rq, s);            // q^{s/2}
      CDDouble zm = z * CDDouble(rq);          // e^{i(x - i gamma/2)}
      CDDouble zp = z / CDDouble(rq);
      CDDouble z2 = z * z;
      CDDouble pV(1.0), pVs(1.0);
      for (const char* k : {"a1", "a2", "a3", "a4"}) {
        DDouble aj = DDouble(base.par(k)) * rqs;
        pV *= CDDouble(1.0) - CDDouble(aj) * z;
        pVs *= CDDouble(1.0) - CDDouble(aj) / z;
      }
      d.V = pV / ((CDDouble(1.0) - z2) * (CDDouble(1.0) - CDDouble(q) * z2));
      CDDouble z2i = CDDouble(1.0) / z2;
      d.Vs = pVs / ((CDDouble(1.0) - z2i) * (CDDouble(1.0) - CDDouble(q) * z2i));
      const CDDouble mi(cplx(0.0, -1.0));
      d.phim = mi * (zm - CDDouble(1.0) / zm);  // 2 sin(x - i gamma/2)
      d.phip = mi * (zp - CDDouble(1.0) / zp);
      d.em = CDDouble(1.0) - (zm + CDDouble(1.0) / zm) * CDDouble(0.5);
      d.ep = CDDouble(1.0) - (zp + CDDouble(1.0) / zp) * CDDouble(0.5);
      break;
    }
    default: throw domain_error("idQM rung needs an idQM family");
  }
  return d;
}

// One rung: input u (degree m-1 on m nodes), output on the given node set.
// Keeping each intermediate on exactly degree+1 nodes matters: noise on a
// p-node set behaves like a degree p-1 polynomial under the off-axis
// evaluation and is amplified accordingly.
inline BaryDD backward_shift_idqm_at(const Family& base, int s, const BaryDD& u,
                                     const std::vector<double>& out_nodes) {
  const CDDouble mi(cplx(0.0, -1.0));
  BaryDD r = BaryDD::on(out_nodes);
  for (size_t k = 0; k < r.nodes.size(); ++k) {
    IdqmRungData d = idqm_rung_data(base, s, r.nodes[k]);
    CDDouble v = mi * (d.V * d.phim * u.eval(d.em) - d.Vs * d.phip * u.eval(d.ep));
    r.vals[k] = v.re;
  }
  return r;
}

inline BaryDD backward_shift_idqm(const Family& fam, const BaryDD& u) {
  return backward_shift_idqm_at(fam, 0, u, u.nodes);
}

// b_{m-1}(lambda) in double-double (only AW's q^{-m/2} is irrational)
inline DDouble b_coeff_dd(const Family& base, int m) {
  if (base.id() == FamilyId::AW) return pow_int(sqrt(DDouble(base.q())), -m);
  return DDouble(base.b_coeff(m));
}

inline BaryDD rodrigues_idqm(const Family& base, int n, int node_count = -1) {
  BaryDD u = BaryDD::on(idqm_eta_nodes(base, 1));
  u.vals[0] = DDouble(1.0);
  for (int m = 1; m <= n; ++m) {
    int count = (m == n && node_count > 0) ? node_count : m + 1;
    u = backward_shift_idqm_at(base, n - m, u, idqm_eta_nodes(base, count));
    DDouble b = b_coeff_dd(base, m);
    for (DDouble& v : u.vals) v /= b;
  }
  return u;
}

// Max relative deviation of the ladder evaluation from the hypergeometric one.
inline double rodrigues_residual(const Family& fam, int n) {
  double worst = 0.0;
  switch (fam.category()) {
    case Category::rdQM: {
      GridFn ladder = rodrigues_lattice(fam, n);
      int xmax = fam.finite() ? fam.N() : std::min(fam.truncation(), 24);
      double scale = 0.0;
      std::vector<double> direct(xmax + 1), lad(xmax + 1);
      for (int x = 0; x <= xmax; ++x) {
        direct[x] = fam.P(n, double(x));
        lad[x] = ladder(double(x));
        scale = std::max(scale, std::abs(direct[x]));
      }
      for (int x = 0; x <= xmax; ++x) worst = std::max(worst, std::abs(direct[x] - lad[x]) / scale);
      return worst;
    }
    case Category::oQM: {
      Poly lad = rodrigues_oqm_coeffs(fam, n);
      auto xs = fam.id() == FamilyId::H   ? chebyshev_points(12, -2.0, 2.0)
                : fam.id() == FamilyId::L ? chebyshev_points(12, 0.2, 2.4)
                                          : chebyshev_points(12, 0.1, 1.45);
      double scale = 0.0;
      std::vector<double> d(xs.size()), l(xs.size());
      for (size_t k = 0; k < xs.size(); ++k) {
        d[k] = fam.P(n, xs[k]);
        l[k] = poly_eval(lad, fam.eta(xs[k]));
        scale = std::max(scale, std::abs(d[k]));
      }
      for (size_t k = 0; k < xs.size(); ++k) worst = std::max(worst, std::abs(d[k] - l[k]) / scale);
      return worst;
    }
    case Category::idQM: {
      BaryDD lad = rodrigues_idqm(fam, n);
      auto xs = fam.id() == FamilyId::AW ? chebyshev_points(12, 0.3, 2.8)
                                         : chebyshev_points(12, 0.25, 2.2);
      double scale = 0.0;
      std::vector<double> d(xs.size()), l(xs.size());
      for (size_t k = 0; k < xs.size(); ++k) {
        d[k] = fam.P(n, xs[k]);
        l[k] = to_double(lad.eval(CDDouble(fam.eta(xs[k]))).re);
        scale = std::max(scale, std::abs(d[k]));
      }
      for (size_t k = 0; k < xs.size(); ++k) worst = std::max(worst, std::abs(d[k] - l[k]) / scale);
      return worst;
    }
  }
  return worst;
}

// Residual of the forward relation F(lambda) P_n(.;lambda) = f_n P_{n-1}(.;lambda+delta).
inline double forward_shift_residual(const Family& fam, int n) {
  Family up = fam.shifted(1);
  double fn = fam.f_coeff(n);
  double worst = 0.0, scale = 0.0;
  switch (fam.category()) {
    case Category::rdQM: {
      GridFn pn = [fam, n](double x) { return fam.P(n, x); };
      GridFn lhs = forward_shift_rdqm(fam, pn);
      int xmax = fam.finite() ? fam.N() : 18;
      for (int x = 0; x <= xmax; ++x) {
        double r = lhs(double(x)), t = fn * up.P(n - 1, double(x));
        scale = std::max({scale, std::abs(t), 1e-30});
        worst = std::max(worst, std::abs(r - t));
      }
      return worst / scale;
    }
    case Category::oQM: {
      Poly pn = oqm_poly_coeffs(fam, n);
      Poly lhs = poly_scale(poly_derivative(pn), fam.cF());
      auto xs = chebyshev_points(10, fam.id() == FamilyId::H ? -2.0 : 0.2,
                                 fam.id() == FamilyId::J ? 1.4 : 2.2);
      for (double x : xs) {
        double e = fam.eta(x);
        double r = poly_eval(lhs, e), t = fn * up.P(n - 1, x);
        scale = std::max({scale, std::abs(t), 1e-30});
        worst = std::max(worst, std::abs(r - t));
      }
      return worst / scale;
    }
    case Category::idQM: {
      const cplx I(0.0, 1.0);
      double g2 = 0.5 * fam.gamma();
      auto xs = chebyshev_points(10, 0.3, 2.4);
      for (double x : xs) {
        cplx lhs = I / varphi_c(fam, x) *
                   (fam.P(n, cplx(x, -g2)) - fam.P(n, cplx(x, g2)));
        double t = fn * up.P(n - 1, x);
        scale = std::max({scale, std::abs(t), 1e-30});
        worst = std::max(worst, std::abs(lhs.real() - t) + std::abs(lhs.imag()));
      }
      return worst / scale;
    }
  }
  return 0.0;
}

// Residual of H-tilde = B(lambda) F(lambda) acting on P_n vs. E(n) P_n.
inline double factorization_residual(const Family& fam, int n_max) {
  double worst = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double en = fam.energy(n);
    double scale = std::max(1.0, std::abs(fam.energy(n_max)));
    switch (fam.category()) {
      case Category::rdQM: {
        GridFn pn = [fam, n](double x) { return fam.P(n, x); };
        GridFn bf = backward_shift_rdqm(fam, forward_shift_rdqm(fam, pn));
        int xmax = fam.finite() ? fam.N() : 16;
        double pscale = 0.0;
        for (int x = 0; x <= xmax; ++x) pscale = std::max(pscale, std::abs(fam.P(n, double(x))));
        for (int x = 0; x <= xmax; ++x)
          worst = std::max(worst,
                           std::abs(bf(double(x)) - en * fam.P(n, double(x))) / (scale * pscale));
        break;
      }
      case Category::oQM: {
        Poly pn = oqm_poly_coeffs(fam, n);
        Poly f = poly_scale(poly_derivative(pn), fam.cF());
        Poly bf = backward_shift_oqm(fam, f);
        auto xs = chebyshev_points(10, fam.id() == FamilyId::H ? -2.0 : 0.2,
                                   fam.id() == FamilyId::J ? 1.4 : 2.2);
        double pscale = 0.0;
        for (double x : xs) pscale = std::max(pscale, std::abs(poly_eval(pn, fam.eta(x))));
        for (double x : xs) {
          double e = fam.eta(x);
          worst = std::max(worst,
                           std::abs(poly_eval(bf, e) - en * poly_eval(pn, e)) / (scale * pscale));
        }
        break;
      }
      case Category::idQM: {
        const cplx I(0.0, 1.0);
        double g2 = 0.5 * fam.gamma();
        auto Ff = [&](cplx z) {
          return I / varphi_c(fam, z) * (fam.P(n, z - I * g2) - fam.P(n, z + I * g2));
        };
        auto xs = chebyshev_points(10, 0.3, 2.4);
        double pscale = 0.0;
        for (double x : xs) pscale = std::max(pscale, std::abs(fam.P(n, x)));
        for (double x : xs) {
          cplx xm = cplx(x, -g2), xp = cplx(x, g2);
          cplx bf = -I * (fam.V(cplx(x, 0.0)) * varphi_c(fam, xm) * Ff(xm) -
                          fam.Vstar(cplx(x, 0.0)) * varphi_c(fam, xp) * Ff(xp));
          worst = std::max(worst, std::abs(bf - en * fam.P(n, cplx(x, 0.0))) / (scale * pscale));
        }
        break;
      }
    }
  }
  return worst;
}

// invert the monotone sinusoidal coordinate on [xlo, xhi] by bisection
inline double invert_eta(const Family& fam, double target, double xlo, double xhi) {
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (xlo + xhi);
    if (fam.eta(mid) < target)
      xlo = mid;
    else
      xhi = mid;
  }
  return 0.5 * (xlo + xhi);
}

// natural x-window of a family (for sampling checks)
inline std::pair<double, double> sample_window(const Family& fam) {
  switch (fam.id()) {
    case FamilyId::H: return {-2.0, 2.0};
    case FamilyId::L: return {0.15, 2.2};
    case FamilyId::J: return {0.1, 1.45};
    case FamilyId::MP: return {-2.4, 2.4};
    case FamilyId::W: return {0.2, 2.4};
    case FamilyId::AW: return {0.3, 2.8};
    default: {
      double hi = fam.finite() ? double(fam.N()) : double(std::min(fam.truncation(), 24));
      return {0.0, hi};
    }
  }
}

// Degree witness: fit through n+3 points at Chebyshev-spread eta values in a
// centred/scaled basis; the degree-n coefficient must be nonzero and the
// (n+1)-th must vanish.
inline bool degree_is_exactly(const Family& fam, int n, double tol = 1e-7) {
  int pts = n + 3;
  auto [xlo, xhi] = sample_window(fam);
  bool monotone = fam.id() != FamilyId::J;  // eta = cos 2x decreases on (0, pi/2)
  double elo = monotone ? fam.eta(xlo) : fam.eta(xhi);
  double ehi = monotone ? fam.eta(xhi) : fam.eta(xlo);
  std::vector<double> etas = chebyshev_points(pts, elo, ehi), vals(pts);
  for (int k = 0; k < pts; ++k) {
    double x = monotone ? invert_eta(fam, etas[k], xlo, xhi)
                        : invert_eta(fam, etas[k], xhi, xlo);
    vals[k] = fam.P(n, x);
    etas[k] = fam.eta(x);
  }
  double ctr = 0.5 * (elo + ehi), rad = 0.5 * std::abs(ehi - elo);
  double vscale = 0.0;
  for (double& e : etas) e = (e - ctr) / rad;
  for (double v : vals) vscale = std::max(vscale, std::abs(v));
  for (double& v : vals) v /= vscale;
  auto c = fit_polynomial(etas, vals, n + 1);
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  return std::abs(c[n]) > tol * scale && std::abs(c[n + 1]) <= tol * scale;
}

}  // namespace dqm
