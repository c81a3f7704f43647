#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "dqm/errors.hpp"
#include "dqm/special.hpp"

namespace dqm {

enum class FamilyId { H, L, J, MP, W, AW, M, R, qR };
enum class Category { oQM, idQM, rdQM };

inline Category category_of(FamilyId id) {
  switch (id) {
    case FamilyId::H:
    case FamilyId::L:
    case FamilyId::J: return Category::oQM;
    case FamilyId::MP:
    case FamilyId::W:
    case FamilyId::AW: return Category::idQM;
    default: return Category::rdQM;
  }
}

inline const char* family_name(FamilyId id) {
  switch (id) {
    case FamilyId::H: return "H";
    case FamilyId::L: return "L";
    case FamilyId::J: return "J";
    case FamilyId::MP: return "MP";
    case FamilyId::W: return "W";
    case FamilyId::AW: return "AW";
    case FamilyId::M: return "M";
    case FamilyId::R: return "R";
    case FamilyId::qR: return "qR";
  }
  return "?";
}

inline std::optional<FamilyId> family_from_name(const std::string& s) {
  static const std::map<std::string, FamilyId> m = {
      {"H", FamilyId::H},  {"L", FamilyId::L},   {"J", FamilyId::J},
      {"MP", FamilyId::MP}, {"W", FamilyId::W},  {"AW", FamilyId::AW},
      {"M", FamilyId::M},  {"R", FamilyId::R},   {"qR", FamilyId::qR}};
  auto it = m.find(s);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

// Named parameters as loaded from CLI/config; converted to the packed form
// inside Family.
struct ParameterVector {
  std::map<std::string, double> values;
  std::optional<double> q_base;
  std::optional<int> N;

  double get(const std::string& k) const {
    auto it = values.find(k);
    if (it == values.end()) throw parameter_error("missing parameter '" + k + "'");
    return it->second;
  }
  bool has(const std::string& k) const { return values.count(k) > 0; }
};

// Coefficients of the closure-relation polynomials, stored high power first:
// R1(y) = r1[0] y + r1[1]; R0, Rm1 quadratic.
struct ClosureData {
  std::array<double, 2> r1{};
  std::array<double, 3> r0{};
  std::array<double, 3> rm1{};

  double R1(double y) const { return r1[0] * y + r1[1]; }
  double R0(double y) const { return (r0[0] * y + r0[1]) * y + r0[2]; }
  double Rm1(double y) const { return (rm1[0] * y + rm1[1]) * y + rm1[2]; }
};

// frequencies alpha_pm(y) = (R1 pm sqrt(R1^2+4R0))/2
inline double closure_discriminant(const ClosureData& c, double y) {
  double r1 = c.R1(y);
  return r1 * r1 + 4.0 * c.R0(y);
}
inline double alpha_plus(const ClosureData& c, double y) {
  return 0.5 * (c.R1(y) + std::sqrt(closure_discriminant(c, y)));
}
inline double alpha_minus(const ClosureData& c, double y) {
  return 0.5 * (c.R1(y) - std::sqrt(closure_discriminant(c, y)));
}

// ---------------------------------------------------------------------------
// Polynomial kernels (series definitions), templated where extended
// precision or complex continuation is needed.
// ---------------------------------------------------------------------------

namespace kernels {

// q^e with the integer part taken exactly; the fractional remainder is a
// fixed promoted constant, so exponents that differ by integers stay exactly
// consistent (which is what the cancelling q-series need)
template <class T>
T qpow(const T& q, double e) {
  double r = std::round(e);
  if (std::abs(e - r) < 1e-12) return pow_like(q, int(r));
  if constexpr (std::is_same_v<T, DDouble>) {
    long long ip = llround(std::floor(e));
    double frac = e - double(ip);
    return pow_int(q, ip) * DDouble(std::pow(to_double(q), frac));
  } else {
    return std::pow(q, e);
  }
}
inline cplx qpow(const cplx& q, const cplx& e) { return std::pow(q, e); }

// M_n(x; beta, c) = 2F1(-n, -x; beta | 1 - 1/c)
template <class T>
T meixner(int n, const T& x, const T& beta, const T& c) {
  T z = T(1.0) - T(1.0) / c;
  T sum(1.0), term(1.0);
  for (int k = 0; k < n; ++k) {
    term *= (T(double(-n)) + T(double(k))) * (-x + T(double(k))) * z /
            ((beta + T(double(k))) * T(double(k + 1)));
    sum += term;
  }
  return sum;
}

// R_n(eta(x); ...) = 4F3(-n, n+dt, -x, x+d; a, b, c | 1), dt = a+b+c-d-1
template <class T>
T racah(int n, const T& x, const T& a, const T& b, const T& c, const T& d) {
  T dt = a + b + c - d - T(1.0);
  T sum(1.0), term(1.0);
  for (int k = 0; k < n; ++k) {
    T kk = T(double(k));
    T num = (T(double(-n)) + kk) * (T(double(n)) + dt + kk) * (-x + kk) * (x + d + kk);
    T den = (a + kk) * (b + kk) * (c + kk) * (kk + T(1.0));
    term *= num / den;
    sum += term;
  }
  return sum;
}

// qR_n = 4phi3(q^{-n}, dt q^n, q^{-x}, d q^x; a, b, c | q; q), dt = a b c / (d q).
// a may be huge (q^{-N}); integer-exponent factors are formed so they cancel
// exactly at the lattice boundaries. Off-lattice x promotes q^{+-x} once
// (an argument-level rounding, harmless) and runs the rest in T.
template <class T>
T q_racah(int n, const T& x, const T& a, const T& b, const T& c, const T& d, const T& q) {
  T dt = a * b * c / (d * q);
  double xd = to_double(x);
  bool lattice = std::abs(xd - std::round(xd)) < 1e-12;
  T qmx = lattice ? T(1.0) / qpow(q, xd) : T(1.0) / T(std::pow(to_double(q), xd));
  T dqx = d * (lattice ? qpow(q, xd) : T(std::pow(to_double(q), xd)));
  T sum(1.0), term(1.0);
  T qk(1.0);
  for (int k = 0; k < n; ++k) {
    T f1 = T(1.0) - qpow(q, double(k - n));          // 1 - q^{-n} q^k, exact 0 at k = n
    T f2 = T(1.0) - dt * qpow(q, double(n + k));     // 1 - dt q^n q^k
    T f3 = T(1.0) - qmx * qk;                        // 1 - q^{-x} q^k
    T f4 = T(1.0) - dqx * qk;                        // 1 - d q^x q^k
    T g1 = T(1.0) - a * qk;
    T g2 = T(1.0) - b * qk;
    T g3 = T(1.0) - c * qk;
    T g4 = T(1.0) - qk * q;
    term *= f1 * f2 * f3 * f4 * q / (g1 * g2 * g3 * g4);
    sum += term;
    qk *= q;
  }
  return sum;
}

// complex-continued q-Racah for complex lattice coordinate
inline cplx q_racah_c(int n, cplx x, double a, double b, double c, double d, double q) {
  double dt = a * b * c / (d * q);
  CDDouble qmx(std::pow(q, -x));
  CDDouble dqx(d * std::pow(q, x));
  CDDouble sum(1.0), term(1.0);
  DDouble qk(1.0);
  const CDDouble one(1.0);
  for (int k = 0; k < n; ++k) {
    CDDouble f = (one - CDDouble(pow_int(DDouble(q), k - n))) *
                 (one - CDDouble(DDouble(dt) * pow_int(DDouble(q), n + k))) *
                 (one - qmx * CDDouble(qk)) * (one - dqx * CDDouble(qk));
    CDDouble g = (one - CDDouble(DDouble(a) * qk)) * (one - CDDouble(DDouble(b) * qk)) *
                 (one - CDDouble(DDouble(c) * qk)) * (one - CDDouble(qk * DDouble(q)));
    term *= f * CDDouble(q) / g;
    sum += term;
    qk *= DDouble(q);
  }
  return sum.to_cplx();
}

// H_n(x) as the terminating 2F0 sum, arranged to stay polynomial at x = 0.
template <class T>
T hermite(int n, const T& x) {
  int kmax = n / 2;
  T sum(0.0);
  for (int k = 0; k <= kmax; ++k) {
    // (-n/2)_k (-(n-1)/2)_k (-1)^k / k! * 2^n x^{n-2k}
    T coef(1.0);
    for (int j = 0; j < k; ++j)
      coef *= (T(-0.5 * n) + T(double(j))) * (T(-0.5 * (n - 1)) + T(double(j)));
    T fact(1.0);
    for (int j = 2; j <= k; ++j) fact *= T(double(j));
    coef = coef * ((k % 2) ? T(-1.0) : T(1.0)) / fact;
    T xp(1.0);
    for (int j = 0; j < n - 2 * k; ++j) xp *= x;
    sum += coef * xp * T(std::pow(2.0, double(n)));
  }
  return sum;
}

// L_n^{(alpha)}(z) = ((alpha+1)_n / n!) 1F1(-n; alpha+1; z)
template <class T>
T laguerre(int n, double alpha, const T& z) {
  T pref = T(pochhammer(alpha + 1.0, n));
  for (int j = 2; j <= n; ++j) pref /= T(double(j));
  T sum(1.0), term(1.0);
  for (int k = 0; k < n; ++k) {
    term *= (double(-n) + double(k)) * z / ((alpha + 1.0 + double(k)) * double(k + 1));
    sum += term;
  }
  return pref * sum;
}

// P_n^{(alpha,beta)}(z) = ((alpha+1)_n / n!) 2F1(-n, n+alpha+beta+1; alpha+1; (1-z)/2)
template <class T>
T jacobi(int n, double alpha, double beta, const T& z) {
  T pref = T(pochhammer(alpha + 1.0, n));
  for (int j = 2; j <= n; ++j) pref /= T(double(j));
  T arg = (T(1.0) - z) * T(0.5);
  T sum(1.0), term(1.0);
  for (int k = 0; k < n; ++k) {
    term *= (double(-n) + double(k)) * (double(n) + alpha + beta + 1.0 + double(k)) * arg /
            ((alpha + 1.0 + double(k)) * double(k + 1));
    sum += term;
  }
  return pref * sum;
}

// Meixner-Pollaczek (phi = pi/2): ((2a)_n / n!) i^n 2F1(-n, a+ix; 2a | 2).
// C is a complex scalar: cplx or CDDouble; the series cancels heavily with n,
// so the verification paths run it in complex double-double.
template <class C>
C meixner_pollaczek_t(int n, double a, const C& x) {
  C i_unit = C(cplx(0.0, 1.0));
  C pref(1.0);
  for (int j = 0; j < n; ++j) pref *= C(2.0 * a + j) * i_unit / C(double(j + 1));
  C sum(1.0), term(1.0);
  for (int k = 0; k < n; ++k) {
    term *= C(double(-n + k)) * (C(a + double(k)) + i_unit * x) * C(2.0) /
            (C(2.0 * a + k) * C(double(k + 1)));
    sum += term;
  }
  return pref * sum;
}

template <class C>
C wilson_t(int n, std::array<double, 4> a, const C& x) {
  double b1 = a[0] + a[1] + a[2] + a[3];
  C ix = C(cplx(0.0, 1.0)) * x;
  C pref(1.0);
  for (int j = 0; j < n; ++j)
    pref *= C(a[0] + a[1] + j) * C(a[0] + a[2] + j) * C(a[0] + a[3] + j);
  C sum(1.0), term(1.0);
  for (int k = 0; k < n; ++k) {
    C num = C(double(-n + k)) * C(double(n) + b1 - 1.0 + k) * (C(a[0] + k) + ix) *
            (C(a[0] + k) - ix);
    C den = C(a[0] + a[1] + k) * C(a[0] + a[2] + k) * C(a[0] + a[3] + k) * C(double(k + 1));
    term *= num / den;
    sum += term;
  }
  return pref * sum;
}

// Askey-Wilson p_n(cos x): z = e^{ix}. Complex double-double throughout: the
// terminating 4phi3 cancels by many orders at moderate n, so every q-power
// must be carried in extended precision, derived from the exact double q.
inline CDDouble askey_wilson_t(int n, std::array<double, 4> a, double q, const CDDouble& z) {
  const DDouble qd(q);
  DDouble b4 = DDouble(a[0]) * DDouble(a[1]) * DDouble(a[2]) * DDouble(a[3]);
  CDDouble pref(1.0);
  DDouble qj(1.0);
  for (int j = 0; j < n; ++j) {
    pref *= CDDouble((DDouble(1.0) - DDouble(a[0]) * DDouble(a[1]) * qj) *
                     (DDouble(1.0) - DDouble(a[0]) * DDouble(a[2]) * qj) *
                     (DDouble(1.0) - DDouble(a[0]) * DDouble(a[3]) * qj) / DDouble(a[0]));
    qj *= qd;
  }
  CDDouble sum(1.0), term(1.0);
  DDouble qk(1.0);
  DDouble qkmn = pow_int(qd, -n);       // q^{k-n}
  DDouble bqnk = b4 * pow_int(qd, n - 1);  // b4 q^{n+k-1}
  const CDDouble one(1.0);
  for (int k = 0; k < n; ++k) {
    CDDouble num = (one - CDDouble(qkmn)) * (one - CDDouble(bqnk)) *
                   (one - CDDouble(DDouble(a[0]) * qk) * z) *
                   (one - CDDouble(DDouble(a[0]) * qk) / z);
    CDDouble den = CDDouble((DDouble(1.0) - DDouble(a[0]) * DDouble(a[1]) * qk) *
                            (DDouble(1.0) - DDouble(a[0]) * DDouble(a[2]) * qk) *
                            (DDouble(1.0) - DDouble(a[0]) * DDouble(a[3]) * qk) *
                            (DDouble(1.0) - qd * qk));
    term *= num * CDDouble(qd) / den;
    sum += term;
    qk *= qd;
    qkmn *= qd;
    bqnk *= qd;
  }
  return pref * sum;
}

inline cplx meixner_pollaczek(int n, double a, cplx x) {
  return meixner_pollaczek_t<CDDouble>(n, a, CDDouble(x)).to_cplx();
}
inline cplx wilson(int n, std::array<double, 4> a, cplx x) {
  return wilson_t<CDDouble>(n, a, CDDouble(x)).to_cplx();
}
inline cplx askey_wilson(int n, std::array<double, 4> a, double q, cplx z) {
  return askey_wilson_t(n, a, q, CDDouble(z)).to_cplx();
}

}  // namespace kernels

// ---------------------------------------------------------------------------
// Family: one of the nine solvable systems, fully populated.
// ---------------------------------------------------------------------------

class Family {
 public:
  static Family make(FamilyId id, const ParameterVector& pv);

  FamilyId id() const { return id_; }
  Category category() const { return cat_; }
  const ParameterVector& params() const { return pv_; }
  int N() const { return N_; }      // -1 when not finite
  double q() const { return q_; }   // 0 when not a q-family
  double kappa() const { return (id_ == FamilyId::AW || id_ == FamilyId::qR) ? 1.0 / q_ : 1.0; }
  bool finite() const { return N_ >= 0; }
  // idQM shift parameter gamma (e^{gamma p} shifts x -> x - i gamma)
  double gamma() const {
    if (cat_ != Category::idQM) throw domain_error("gamma is idQM only");
    return id_ == FamilyId::AW ? std::log(q_) : 1.0;
  }

  Family shifted(int s) const;  // lambda + s*delta

  // sinusoidal coordinate and spectrum
  double eta(double x) const;
  cplx eta(cplx x) const;
  template <class T>
  T eta_t(const T& x) const;
  double energy(int n) const;
  DDouble energy_dd(int n) const;

  // rdQM potentials (analytic continuation off the lattice allowed)
  double B(double x) const;
  double D(double x) const;
  template <class T>
  T B_t(const T& x) const;
  template <class T>
  T D_t(const T& x) const;
  template <class T>
  T varphi_t(const T& x) const;

  // idQM potentials
  cplx V(cplx x) const;
  cplx Vstar(cplx x) const;

  // oQM prepotential and derivatives
  double w(double x) const;
  double dw(double x) const;
  double d2w(double x) const;
  double U(double x) const { return dw(x) * dw(x) + d2w(x); }

  // weights and norms
  double phi0_squared(double x) const;          // continuous form (oQM/idQM; rdQM closed form)
  double phi0_squared_lattice(int x) const;     // rdQM product form, phi0(0)^2 = 1
  template <class T>
  T phi0_squared_lattice_t(int x) const;
  double norm_constant(int n) const;            // h_n (oQM/idQM) or d_n^2 (rdQM)

  // shift-operator constants: A phi_n = f_n phi_{n-1}(lambda+delta)...,
  // b_coeff(n) is b_{n-1} in  B P_{n-1}(lambda+delta) = b_{n-1} P_n(lambda)
  double f_coeff(int n) const;
  double b_coeff(int n) const;

  ClosureData closure() const;

  double varphi(double x) const;      // auxiliary phi(x; lambda) of the shift operators
  double cF() const;                  // oQM forward-shift constant
  double c1(double eta_val) const;    // oQM first-order coefficient
  double c2(double eta_val) const;    // oQM second-order coefficient

  // eigenpolynomials: P(n, x) evaluates P_n(eta(x))
  double P(int n, double x) const;
  cplx P(int n, cplx x) const;
  template <class T>
  T P_lattice_t(int n, const T& x) const;   // rdQM only
  double P_of_eta(int n, double eta_val) const;  // oQM only (polynomial in eta)

  // rdQM truncation point for infinite (M) lattices
  int truncation() const;

  // named parameter access used by the exceptional/unified engines
  double par(const std::string& k) const { return pv_.get(k); }
  double dtilde() const;

 private:
  Family() = default;
  void validate() const;

  FamilyId id_{};
  Category cat_{};
  ParameterVector pv_;
  double q_ = 0.0;
  int N_ = -1;
};

// -------------------------------------------------------------------------

inline Family Family::make(FamilyId id, const ParameterVector& pv) {
  Family f;
  f.id_ = id;
  f.cat_ = category_of(id);
  f.pv_ = pv;
  f.q_ = pv.q_base.value_or(0.0);
  f.N_ = pv.N.value_or(-1);
  if (id == FamilyId::R || id == FamilyId::qR) {
    if (!pv.N) throw parameter_error("R/qR need N");
    // a is fixed by N: additive a = -N, multiplicative a = q^{-N}
  }
  f.validate();
  return f;
}

inline void Family::validate() const {
  auto req = [&](bool ok, const char* ineq) {
    if (!ok) throw parameter_error(std::string(family_name(id_)) + ": violated " + ineq);
  };
  switch (id_) {
    case FamilyId::H: break;
    case FamilyId::L: req(pv_.get("g") > 0.0, "g > 0"); break;
    case FamilyId::J:
      req(pv_.get("g") > 0.0, "g > 0");
      req(pv_.get("h") > 0.0, "h > 0");
      break;
    case FamilyId::MP: req(pv_.get("a") > 0.0, "a > 0"); break;
    case FamilyId::W:
      for (const char* k : {"a1", "a2", "a3", "a4"}) req(pv_.get(k) > 0.0, "Re(a_j) > 0");
      break;
    case FamilyId::AW:
      req(q_ > 0.0 && q_ < 1.0, "0 < q < 1");
      for (const char* k : {"a1", "a2", "a3", "a4"})
        req(std::abs(pv_.get(k)) < 1.0, "|a_j| < 1");
      break;
    case FamilyId::M:
      req(pv_.get("beta") > 0.0, "beta > 0");
      req(pv_.get("c") > 0.0 && pv_.get("c") < 1.0, "0 < c < 1");
      break;
    case FamilyId::R: {
      req(N_ >= 1, "N >= 1");
      double a = -double(N_), b = pv_.get("b"), c = pv_.get("c"), d = pv_.get("d");
      req(a + b > d, "a + b > d");
      req(d > 0.0, "d > 0");
      req(c > 0.0 && c < 1.0 + d, "0 < c < 1 + d");
      break;
    }
    case FamilyId::qR: {
      req(N_ >= 1, "N >= 1");
      req(q_ > 0.0 && q_ < 1.0, "0 < q < 1");
      double a = std::pow(q_, -double(N_));
      double b = pv_.get("b"), c = pv_.get("c"), d = pv_.get("d");
      req(a * b > 0.0 && a * b < d, "0 < ab < d");
      req(d < 1.0, "d < 1");
      req(q_ * d < c, "qd < c");
      req(c < 1.0, "c < 1");
      break;
    }
  }
}

inline Family Family::shifted(int s) const {
  ParameterVector pv = pv_;
  switch (id_) {
    case FamilyId::H: break;
    case FamilyId::L: pv.values["g"] += s; break;
    case FamilyId::J:
      pv.values["g"] += s;
      pv.values["h"] += s;
      break;
    case FamilyId::MP: pv.values["a"] += 0.5 * s; break;
    case FamilyId::W:
      for (const char* k : {"a1", "a2", "a3", "a4"}) pv.values[k] += 0.5 * s;
      break;
    case FamilyId::AW: {
      double f = std::pow(q_, 0.5 * s);
      for (const char* k : {"a1", "a2", "a3", "a4"}) pv.values[k] *= f;
      break;
    }
    case FamilyId::M: pv.values["beta"] += s; break;
    case FamilyId::R:
      for (const char* k : {"b", "c", "d"}) pv.values[k] += s;
      pv.N = N_ - s;
      break;
    case FamilyId::qR: {
      double f = std::pow(q_, double(s));
      for (const char* k : {"b", "c", "d"}) pv.values[k] *= f;
      pv.N = N_ - s;
      break;
    }
  }
  return make(id_, pv);
}

inline double Family::eta(double x) const {
  switch (id_) {
    case FamilyId::H: return x;
    case FamilyId::L: return x * x;
    case FamilyId::J: return std::cos(2.0 * x);
    case FamilyId::MP: return x;
    case FamilyId::W: return x * x;
    case FamilyId::AW: return 1.0 - std::cos(x);
    case FamilyId::M: return x;
    case FamilyId::R: return x * (x + pv_.get("d"));
    case FamilyId::qR: {
      double d = pv_.get("d");
      return (std::pow(q_, -x) - 1.0) * (1.0 - d * std::pow(q_, x));
    }
  }
  return 0.0;
}

inline cplx Family::eta(cplx x) const {
  switch (id_) {
    case FamilyId::H: return x;
    case FamilyId::L: return x * x;
    case FamilyId::J: return std::cos(2.0 * x);
    case FamilyId::MP: return x;
    case FamilyId::W: return x * x;
    case FamilyId::AW: return 1.0 - std::cos(x);
    case FamilyId::M: return x;
    case FamilyId::R: return x * (x + pv_.get("d"));
    case FamilyId::qR: {
      double d = pv_.get("d");
      return (std::pow(q_, -x) - 1.0) * (1.0 - d * std::pow(q_, x));
    }
  }
  return {};
}

inline double Family::dtilde() const {
  if (id_ == FamilyId::R) return -double(N_) + pv_.get("b") + pv_.get("c") - pv_.get("d") - 1.0;
  if (id_ == FamilyId::qR) {
    double a = std::pow(q_, -double(N_));
    return a * pv_.get("b") * pv_.get("c") / (pv_.get("d") * q_);
  }
  throw domain_error("dtilde defined for R/qR only");
}

template <class T>
T Family::eta_t(const T& x) const {
  switch (id_) {
    case FamilyId::M: return x;
    case FamilyId::R: return x * (x + T(pv_.get("d")));
    case FamilyId::qR: {
      T q = T(q_);
      T qx = kernels::qpow(q, to_double(x));
      return (T(1.0) / qx - T(1.0)) * (T(1.0) - T(pv_.get("d")) * qx);
    }
    default: throw domain_error("eta_t is rdQM only");
  }
}

inline DDouble Family::energy_dd(int n) const {
  switch (id_) {
    case FamilyId::H: return DDouble(2.0 * n);
    case FamilyId::L: return DDouble(4.0 * n);
    case FamilyId::J:
      return DDouble(4.0 * n) * (DDouble(double(n)) + DDouble(pv_.get("g")) + DDouble(pv_.get("h")));
    case FamilyId::MP: return DDouble(2.0 * n);
    case FamilyId::W: {
      DDouble b1 = DDouble(pv_.get("a1")) + DDouble(pv_.get("a2")) + DDouble(pv_.get("a3")) +
                   DDouble(pv_.get("a4"));
      return DDouble(double(n)) * (DDouble(double(n)) + b1 - DDouble(1.0));
    }
    case FamilyId::AW: {
      DDouble b4 = DDouble(pv_.get("a1")) * DDouble(pv_.get("a2")) * DDouble(pv_.get("a3")) *
                   DDouble(pv_.get("a4"));
      DDouble q(q_);
      return (pow_int(q, -n) - DDouble(1.0)) * (DDouble(1.0) - b4 * pow_int(q, n - 1));
    }
    case FamilyId::M: return DDouble(double(n));
    case FamilyId::R: {
      DDouble dt = DDouble(-double(N_)) + DDouble(pv_.get("b")) + DDouble(pv_.get("c")) -
                   DDouble(pv_.get("d")) - DDouble(1.0);
      return DDouble(double(n)) * (DDouble(double(n)) + dt);
    }
    case FamilyId::qR: {
      DDouble q(q_);
      DDouble dt = pow_int(q, -N_) * DDouble(pv_.get("b")) * DDouble(pv_.get("c")) /
                   (DDouble(pv_.get("d")) * q);
      return (pow_int(q, -n) - DDouble(1.0)) * (DDouble(1.0) - dt * pow_int(q, n));
    }
  }
  return DDouble(0.0);
}

inline double Family::energy(int n) const {
  switch (id_) {
    case FamilyId::H: return 2.0 * n;
    case FamilyId::L: return 4.0 * n;
    case FamilyId::J: return 4.0 * n * (n + pv_.get("g") + pv_.get("h"));
    case FamilyId::MP: return 2.0 * n;
    case FamilyId::W: {
      double b1 = pv_.get("a1") + pv_.get("a2") + pv_.get("a3") + pv_.get("a4");
      return double(n) * (n + b1 - 1.0);
    }
    case FamilyId::AW: {
      double b4 = pv_.get("a1") * pv_.get("a2") * pv_.get("a3") * pv_.get("a4");
      return (std::pow(q_, -n) - 1.0) * (1.0 - b4 * std::pow(q_, n - 1));
    }
    case FamilyId::M: return double(n);
    case FamilyId::R: return double(n) * (n + dtilde());
    case FamilyId::qR: return (std::pow(q_, -n) - 1.0) * (1.0 - dtilde() * std::pow(q_, n));
  }
  return 0.0;
}

template <class T>
T Family::B_t(const T& x) const {
  switch (id_) {
    case FamilyId::M: {
      T c = T(pv_.get("c"));
      return c / (T(1.0) - c) * (x + T(pv_.get("beta")));
    }
    case FamilyId::R: {
      if (N_ >= 0 && std::abs(to_double(x) - N_) < 1e-12) return T(0.0);
      T a = T(-double(N_));
      T b = T(pv_.get("b")), c = T(pv_.get("c")), d = T(pv_.get("d"));
      return -(x + a) * (x + b) * (x + c) * (x + d) /
             ((T(2.0) * x + d) * (T(2.0) * x + T(1.0) + d));
    }
    case FamilyId::qR: {
      if (N_ >= 0 && std::abs(to_double(x) - N_) < 1e-12) return T(0.0);
      T b = T(pv_.get("b")), c = T(pv_.get("c")), d = T(pv_.get("d")), q = T(q_);
      T aqx = kernels::qpow(q, to_double(x) - N_);  // a q^x, exact 1 at x = N
      T qx = kernels::qpow(q, to_double(x));
      return -(T(1.0) - aqx) * (T(1.0) - b * qx) * (T(1.0) - c * qx) * (T(1.0) - d * qx) /
             ((T(1.0) - d * qx * qx) * (T(1.0) - d * qx * qx * q));
    }
    default: throw domain_error("B(x) is rdQM only");
  }
}

template <class T>
T Family::D_t(const T& x) const {
  switch (id_) {
    case FamilyId::M:
      return x / (T(1.0) - T(pv_.get("c")));
    case FamilyId::R: {
      if (std::abs(to_double(x)) < 1e-12) return T(0.0);
      T a = T(-double(N_));
      T b = T(pv_.get("b")), c = T(pv_.get("c")), d = T(pv_.get("d"));
      return -(x + d - a) * (x + d - b) * (x + d - c) * x /
             ((T(2.0) * x - T(1.0) + d) * (T(2.0) * x + d));
    }
    case FamilyId::qR: {
      if (std::abs(to_double(x)) < 1e-12) return T(0.0);
      T b = T(pv_.get("b")), c = T(pv_.get("c")), d = T(pv_.get("d")), q = T(q_);
      T dt = kernels::qpow(q, double(-N_)) * b * c / (d * q);
      T qx = kernels::qpow(q, to_double(x));
      T adqx = d * kernels::qpow(q, to_double(x) + N_);  // a^{-1} d q^x
      return -dt * (T(1.0) - adqx) * (T(1.0) - d / b * qx) * (T(1.0) - d / c * qx) *
             (T(1.0) - qx) / ((T(1.0) - d * qx * qx / q) * (T(1.0) - d * qx * qx));
    }
    default: throw domain_error("D(x) is rdQM only");
  }
}

template <class T>
T Family::varphi_t(const T& x) const {
  switch (id_) {
    case FamilyId::M: return T(1.0);
    case FamilyId::R: {
      T d = T(pv_.get("d"));
      return (T(2.0) * x + d + T(1.0)) / (d + T(1.0));
    }
    case FamilyId::qR: {
      T d = T(pv_.get("d")), q = T(q_);
      return (T(1.0) / kernels::qpow(q, to_double(x)) - d * kernels::qpow(q, to_double(x) + 1.0)) /
             (T(1.0) - d * q);
    }
    default: throw domain_error("varphi_t is rdQM only");
  }
}

inline double Family::B(double x) const { return B_t<double>(x); }
inline double Family::D(double x) const { return D_t<double>(x); }

inline cplx Family::V(cplx x) const {
  const cplx I(0.0, 1.0);
  switch (id_) {
    case FamilyId::MP: return pv_.get("a") + I * x;
    case FamilyId::W: {
      cplx ix = I * x;
      cplx num = (pv_.get("a1") + ix) * (pv_.get("a2") + ix) * (pv_.get("a3") + ix) *
                 (pv_.get("a4") + ix);
      return num / ((2.0 * ix) * (2.0 * ix + 1.0));
    }
    case FamilyId::AW: {
      cplx z = std::exp(I * x);
      cplx num = (1.0 - pv_.get("a1") * z) * (1.0 - pv_.get("a2") * z) * (1.0 - pv_.get("a3") * z) *
                 (1.0 - pv_.get("a4") * z);
      return num / ((1.0 - z * z) * (1.0 - q_ * z * z));
    }
    default: throw domain_error("V(x) is idQM only");
  }
}

inline cplx Family::Vstar(cplx x) const {
  const cplx I(0.0, 1.0);
  switch (id_) {
    case FamilyId::MP: return pv_.get("a") - I * x;
    case FamilyId::W: {
      cplx ix = I * x;
      cplx num = (pv_.get("a1") - ix) * (pv_.get("a2") - ix) * (pv_.get("a3") - ix) *
                 (pv_.get("a4") - ix);
      return num / ((-2.0 * ix) * (-2.0 * ix + 1.0));
    }
    case FamilyId::AW: {
      cplx z = std::exp(-I * x);
      cplx num = (1.0 - pv_.get("a1") * z) * (1.0 - pv_.get("a2") * z) * (1.0 - pv_.get("a3") * z) *
                 (1.0 - pv_.get("a4") * z);
      return num / ((1.0 - z * z) * (1.0 - q_ * z * z));
    }
    default: throw domain_error("Vstar(x) is idQM only");
  }
}

inline double Family::w(double x) const {
  switch (id_) {
    case FamilyId::H: return -0.5 * x * x;
    case FamilyId::L: return -0.5 * x * x + pv_.get("g") * std::log(x);
    case FamilyId::J: return pv_.get("g") * std::log(std::sin(x)) + pv_.get("h") * std::log(std::cos(x));
    default: throw domain_error("prepotential is oQM only");
  }
}

inline double Family::dw(double x) const {
  switch (id_) {
    case FamilyId::H: return -x;
    case FamilyId::L: return -x + pv_.get("g") / x;
    case FamilyId::J: return pv_.get("g") / std::tan(x) - pv_.get("h") * std::tan(x);
    default: throw domain_error("prepotential is oQM only");
  }
}

inline double Family::d2w(double x) const {
  switch (id_) {
    case FamilyId::H: return -1.0;
    case FamilyId::L: return -1.0 - pv_.get("g") / (x * x);
    case FamilyId::J: {
      double s = std::sin(x), c = std::cos(x);
      return -pv_.get("g") / (s * s) - pv_.get("h") / (c * c);
    }
    default: throw domain_error("prepotential is oQM only");
  }
}

template <class T>
T Family::phi0_squared_lattice_t(int x) const {
  if (cat_ != Category::rdQM) throw domain_error("lattice weight is rdQM only");
  if (x < 0) throw domain_error("lattice point must be non-negative");
  // phi0(x)^2 = prod_{y=0}^{x-1} B(y)/D(y+1), phi0(0)^2 = 1
  T r(1.0);
  for (int y = 0; y < x; ++y) r *= B_t(T(double(y))) / D_t(T(double(y + 1)));
  return r;
}

inline double Family::phi0_squared_lattice(int x) const { return phi0_squared_lattice_t<double>(x); }

inline double Family::phi0_squared(double x) const {
  switch (cat_) {
    case Category::oQM: return std::exp(2.0 * w(x));
    case Category::idQM: {
      const cplx I(0.0, 1.0);
      if (id_ == FamilyId::MP) {
        return std::exp(2.0 * log_gamma(cplx(pv_.get("a"), x)).real());
      }
      if (id_ == FamilyId::W) {
        double s = 0.0;
        for (const char* k : {"a1", "a2", "a3", "a4"})
          s += 2.0 * log_gamma(cplx(pv_.get(k), x)).real();
        s -= 2.0 * log_gamma(cplx(0.0, 2.0 * x)).real();
        return std::exp(s);
      }
      // AW
      cplx z = std::exp(I * x);
      cplx num = q_pochhammer_inf(z * z, q_) * q_pochhammer_inf(1.0 / (z * z), q_);
      cplx den(1.0, 0.0);
      for (const char* k : {"a1", "a2", "a3", "a4"})
        den *= q_pochhammer_inf(pv_.get(k) * z, q_) * q_pochhammer_inf(pv_.get(k) / z, q_);
      return (num / den).real();
    }
    case Category::rdQM: {
      int xi = int(std::lround(x));
      if (std::abs(x - xi) > 1e-9) throw domain_error("rdQM weight needs a lattice point");
      return phi0_squared_lattice(xi);
    }
  }
  return 0.0;
}

inline double Family::norm_constant(int n) const {
  if (n < 0) throw index_error("norm_constant: n must be non-negative");
  if (finite() && n > N_) throw index_error("norm_constant: n exceeds N");
  const double pi = 3.14159265358979323846;
  switch (id_) {
    case FamilyId::H: {
      double r = std::sqrt(pi);
      for (int j = 1; j <= n; ++j) r *= 2.0 * j;
      return r;
    }
    case FamilyId::L:
      return std::exp(log_gamma_real(n + pv_.get("g") + 0.5) - log_gamma_real(n + 1.0)) / 2.0;
    case FamilyId::J: {
      double g = pv_.get("g"), h = pv_.get("h");
      return std::exp(log_gamma_real(n + g + 0.5) + log_gamma_real(n + h + 0.5) -
                      log_gamma_real(n + 1.0) - log_gamma_real(n + g + h)) /
             (2.0 * (2.0 * n + g + h));
    }
    case FamilyId::MP: {
      double a = pv_.get("a");
      return 2.0 * pi * std::exp(log_gamma_real(n + 2.0 * a) - log_gamma_real(n + 1.0)) /
             std::pow(2.0, 2.0 * a);
    }
    case FamilyId::W: {
      double aj[4] = {pv_.get("a1"), pv_.get("a2"), pv_.get("a3"), pv_.get("a4")};
      double b1 = aj[0] + aj[1] + aj[2] + aj[3];
      double s = log_gamma_real(n + 1.0) - log_gamma_real(2.0 * n + b1);
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) s += log_gamma_real(n + aj[i] + aj[j]);
      return 2.0 * pi * pochhammer(double(n) + b1 - 1.0, n) * std::exp(s);
    }
    case FamilyId::AW: {
      double aj[4] = {pv_.get("a1"), pv_.get("a2"), pv_.get("a3"), pv_.get("a4")};
      double b4 = aj[0] * aj[1] * aj[2] * aj[3];
      double num = q_pochhammer(b4 * std::pow(q_, n - 1), q_, n) *
                   q_pochhammer_inf(cplx(b4 * std::pow(q_, 2 * n), 0.0), q_).real();
      double den = q_pochhammer_inf(cplx(std::pow(q_, n + 1), 0.0), q_).real();
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          den *= q_pochhammer_inf(cplx(aj[i] * aj[j] * std::pow(q_, n), 0.0), q_).real();
      return 2.0 * pi * num / den;
    }
    case FamilyId::M: {
      double beta = pv_.get("beta"), c = pv_.get("c");
      double r = std::pow(1.0 - c, beta);
      for (int j = 0; j < n; ++j) r *= (beta + j) * c / double(j + 1);
      return r;
    }
    case FamilyId::R: {
      double a = -double(N_), b = pv_.get("b"), c = pv_.get("c"), d = pv_.get("d");
      double dt = dtilde();
      double r = pochhammer(a, n) * pochhammer(b, n) * pochhammer(c, n) * pochhammer(dt, n) /
                 (pochhammer(1.0 + dt - a, n) * pochhammer(1.0 + dt - b, n) *
                  pochhammer(1.0 + dt - c, n) * pochhammer(1.0, n));
      r *= (2.0 * n + dt) / dt;
      double tail = ((N_ % 2) ? -1.0 : 1.0) * pochhammer(1.0 + d - a, N_) *
                    pochhammer(1.0 + d - b, N_) * pochhammer(1.0 + d - c, N_) /
                    (pochhammer(dt + 1.0, N_) * pochhammer(d + 1.0, 2 * N_));
      return r * tail;
    }
    case FamilyId::qR: {
      double b = pv_.get("b"), c = pv_.get("c"), d = pv_.get("d");
      double a = std::pow(q_, -double(N_));
      double dt = dtilde();
      double r = q_pochhammer(a, q_, n) * q_pochhammer(b, q_, n) * q_pochhammer(c, q_, n) *
                 q_pochhammer(dt, q_, n) /
                 (q_pochhammer(dt * q_ / a, q_, n) * q_pochhammer(dt * q_ / b, q_, n) *
                  q_pochhammer(dt * q_ / c, q_, n) * q_pochhammer(q_, q_, n) * std::pow(d, n));
      r *= (1.0 - dt * std::pow(q_, 2 * n)) / (1.0 - dt);
      double tail = ((N_ % 2) ? -1.0 : 1.0) * q_pochhammer(d * q_ / a, q_, N_) *
                    q_pochhammer(d * q_ / b, q_, N_) * q_pochhammer(d * q_ / c, q_, N_) *
                    std::pow(dt, N_) * std::pow(q_, 0.5 * N_ * (N_ + 1)) /
                    (q_pochhammer(dt * q_, q_, N_) * q_pochhammer(d * q_, q_, 2 * N_));
      return r * tail;
    }
  }
  return 0.0;
}

inline double Family::f_coeff(int n) const {
  switch (id_) {
    case FamilyId::H: return 2.0 * n;
    case FamilyId::L: return -2.0;
    case FamilyId::J: return -2.0 * (n + pv_.get("g") + pv_.get("h"));
    case FamilyId::MP: return 2.0;
    case FamilyId::W: {
      double b1 = pv_.get("a1") + pv_.get("a2") + pv_.get("a3") + pv_.get("a4");
      return -double(n) * (n + b1 - 1.0);
    }
    case FamilyId::AW: return std::pow(q_, 0.5 * n) * energy(n);
    default: return energy(n);  // rdQM
  }
}

inline double Family::b_coeff(int n) const {
  switch (id_) {
    case FamilyId::H: return 1.0;
    case FamilyId::L:
    case FamilyId::J: return -2.0 * n;
    case FamilyId::MP: return double(n);
    case FamilyId::W: return -1.0;
    case FamilyId::AW: return std::pow(q_, -0.5 * n);
    default: return 1.0;  // rdQM
  }
}

inline ClosureData Family::closure() const {
  ClosureData c;
  switch (id_) {
    case FamilyId::H:
      c.r0 = {0.0, 0.0, 4.0};
      break;
    case FamilyId::L: {
      double g = pv_.get("g");
      c.r0 = {0.0, 0.0, 16.0};
      c.rm1 = {0.0, -8.0, -8.0 * (2.0 * g + 1.0)};
      break;
    }
    case FamilyId::J: {
      double g = pv_.get("g"), h = pv_.get("h");
      c.r1 = {0.0, 8.0};
      c.r0 = {0.0, 16.0, 16.0 * ((g + h) * (g + h) - 1.0)};
      c.rm1 = {0.0, 0.0, 16.0 * (g - h) * (g + h - 1.0)};
      break;
    }
    case FamilyId::MP:
      c.r0 = {0.0, 0.0, 4.0};
      break;
    case FamilyId::W: {
      double aj[4] = {pv_.get("a1"), pv_.get("a2"), pv_.get("a3"), pv_.get("a4")};
      double b1 = aj[0] + aj[1] + aj[2] + aj[3];
      double b2 = 0.0, b3 = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) b2 += aj[i] * aj[j];
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          for (int k = j + 1; k < 4; ++k) b3 += aj[i] * aj[j] * aj[k];
      c.r1 = {0.0, 2.0};
      c.r0 = {0.0, 4.0, b1 * (b1 - 2.0)};
      c.rm1 = {-2.0, b1 - 2.0 * b2, (2.0 - b1) * b3};
      break;
    }
    case FamilyId::AW: {
      double aj[4] = {pv_.get("a1"), pv_.get("a2"), pv_.get("a3"), pv_.get("a4")};
      double b1 = aj[0] + aj[1] + aj[2] + aj[3];
      double b3 = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          for (int k = j + 1; k < 4; ++k) b3 += aj[i] * aj[j] * aj[k];
      double b4 = aj[0] * aj[1] * aj[2] * aj[3];
      double cq = std::pow(1.0 / std::sqrt(q_) - std::sqrt(q_), 2);
      double y0 = 1.0 + b4 / q_;  // y' = y + y0
      // R1 = cq y'
      c.r1 = {cq, cq * y0};
      // R0 = cq (y'^2 - (1+1/q)^2 b4)
      double pq = (1.0 + 1.0 / q_);
      c.r0 = {cq, 2.0 * cq * y0, cq * (y0 * y0 - pq * pq * b4)};
      // Rm1 = cq/2 ((b1 + b3/q) y' - (1+1/q)(b3 + b1 b4 / q)) - R0
      double l1 = 0.5 * cq * (b1 + b3 / q_);
      double l0 = -0.5 * cq * pq * (b3 + b1 * b4 / q_);
      c.rm1 = {-c.r0[0], l1 - c.r0[1], l1 * y0 + l0 - c.r0[2]};
      break;
    }
    case FamilyId::M: {
      double beta = pv_.get("beta"), cc = pv_.get("c");
      c.r0 = {0.0, 0.0, 1.0};
      c.rm1 = {0.0, -(1.0 + cc) / (1.0 - cc), -beta * cc / (1.0 - cc)};
      break;
    }
    case FamilyId::R: {
      double a = -double(N_), b = pv_.get("b"), cc = pv_.get("c"), d = pv_.get("d");
      double dt = dtilde();
      c.r1 = {0.0, 2.0};
      c.r0 = {0.0, 4.0, dt * dt - 1.0};
      double s2 = a * b + b * cc + cc * a;
      c.rm1 = {2.0, 2.0 * s2 - (1.0 + d) * (1.0 + dt), a * b * cc * (dt - 1.0)};
      break;
    }
    case FamilyId::qR: {
      double b = pv_.get("b"), cc = pv_.get("c"), d = pv_.get("d");
      double a = std::pow(q_, -double(N_));
      double dt = dtilde();
      double cq = std::pow(1.0 / std::sqrt(q_) - std::sqrt(q_), 2);
      double y0 = 1.0 + dt;
      c.r1 = {cq, cq * y0};
      double pq = (1.0 / std::sqrt(q_) + std::sqrt(q_));
      c.r0 = {cq, 2.0 * cq * y0, cq * (y0 * y0 - pq * pq * dt)};
      double s2 = a * b + b * cc + cc * a;
      double q2 = (1.0 + d);
      double q1 = -(a + b + cc + d + dt + s2 / q_);
      double q0 = (1.0 - a) * (1.0 - b) * (1.0 - cc) * (1.0 - dt / q_) +
                  (a + b + cc - 1.0 - d * dt + s2 / q_) * (1.0 + dt);
      // cq (q2 y'^2 + q1 y' + q0) expanded in y
      c.rm1 = {cq * q2, cq * (2.0 * q2 * y0 + q1), cq * (q2 * y0 * y0 + q1 * y0 + q0)};
      break;
    }
  }
  return c;
}

inline double Family::varphi(double x) const {
  switch (id_) {
    case FamilyId::MP: return 1.0;
    case FamilyId::W: return 2.0 * x;
    case FamilyId::AW: return 2.0 * std::sin(x);
    case FamilyId::M:
    case FamilyId::R:
    case FamilyId::qR: return varphi_t<double>(x);
    default: throw domain_error("varphi is dQM only");
  }
}

inline double Family::cF() const {
  switch (id_) {
    case FamilyId::H: return 1.0;
    case FamilyId::L: return 2.0;
    case FamilyId::J: return -4.0;
    default: throw domain_error("cF is oQM only");
  }
}

inline double Family::c1(double e) const {
  switch (id_) {
    case FamilyId::H: return -0.5 * e;
    case FamilyId::L: return pv_.get("g") + 0.5 - e;
    case FamilyId::J: {
      double g = pv_.get("g"), h = pv_.get("h");
      return h - g - (g + h + 1.0) * e;
    }
    default: throw domain_error("c1 is oQM only");
  }
}

inline double Family::c2(double e) const {
  switch (id_) {
    case FamilyId::H: return 0.25;
    case FamilyId::L: return e;
    case FamilyId::J: return 1.0 - e * e;
    default: throw domain_error("c2 is oQM only");
  }
}

template <class T>
T Family::P_lattice_t(int n, const T& x) const {
  switch (id_) {
    case FamilyId::M:
      return kernels::meixner(n, x, T(pv_.get("beta")), T(pv_.get("c")));
    case FamilyId::R:
      return kernels::racah(n, x, T(-double(N_)), T(pv_.get("b")), T(pv_.get("c")),
                            T(pv_.get("d")));
    case FamilyId::qR: {
      T q = T(q_);
      T a = kernels::qpow(q, double(-N_));
      return kernels::q_racah(n, x, a, T(pv_.get("b")), T(pv_.get("c")), T(pv_.get("d")), q);
    }
    default: throw domain_error("P_lattice_t is rdQM only");
  }
}

inline double Family::P_of_eta(int n, double e) const {
  switch (id_) {
    case FamilyId::H: return kernels::hermite(n, e);
    case FamilyId::L: return kernels::laguerre(n, pv_.get("g") - 0.5, e);
    case FamilyId::J: return kernels::jacobi(n, pv_.get("g") - 0.5, pv_.get("h") - 0.5, e);
    default: throw domain_error("P_of_eta is oQM only");
  }
}

inline cplx Family::P(int n, cplx x) const {
  const cplx I(0.0, 1.0);
  switch (id_) {
    case FamilyId::H: return kernels::hermite(n, x);
    case FamilyId::L: return kernels::laguerre(n, pv_.get("g") - 0.5, x * x);
    case FamilyId::J: return kernels::jacobi(n, pv_.get("g") - 0.5, pv_.get("h") - 0.5, std::cos(2.0 * x));
    case FamilyId::MP: return kernels::meixner_pollaczek(n, pv_.get("a"), x);
    case FamilyId::W:
      return kernels::wilson(n, {pv_.get("a1"), pv_.get("a2"), pv_.get("a3"), pv_.get("a4")}, x);
    case FamilyId::AW:
      return kernels::askey_wilson(n, {pv_.get("a1"), pv_.get("a2"), pv_.get("a3"), pv_.get("a4")},
                                   q_, std::exp(I * x));
    case FamilyId::M:
      return kernels::meixner(n, CDDouble(x), CDDouble(pv_.get("beta")), CDDouble(pv_.get("c")))
          .to_cplx();
    case FamilyId::R:
      return kernels::racah(n, CDDouble(x), CDDouble(-double(N_)), CDDouble(pv_.get("b")),
                            CDDouble(pv_.get("c")), CDDouble(pv_.get("d")))
          .to_cplx();
    case FamilyId::qR:
      return kernels::q_racah_c(n, x, std::pow(q_, -double(N_)), pv_.get("b"), pv_.get("c"),
                                pv_.get("d"), q_);
  }
  return {};
}

inline double Family::P(int n, double x) const {
  switch (cat_) {
    // the terminating series cancel past double range at moderate n, so the
    // scalar entry points run in double-double throughout
    case Category::rdQM:
      if (std::abs(x - std::round(x)) < 1e-9)
        return to_double(P_lattice_t<DDouble>(n, DDouble(std::round(x))));
      return to_double(P_lattice_t<DDouble>(n, DDouble(x)));  // continued off-lattice
    case Category::oQM: {
      double e = eta(x);
      switch (id_) {
        case FamilyId::H: return to_double(kernels::hermite(n, DDouble(e)));
        case FamilyId::L: return to_double(kernels::laguerre(n, pv_.get("g") - 0.5, DDouble(e)));
        default:
          return to_double(kernels::jacobi(n, pv_.get("g") - 0.5, pv_.get("h") - 0.5, DDouble(e)));
      }
    }
    case Category::idQM: {
      cplx v = P(n, cplx(x, 0.0));
      return v.real();
    }
  }
  return 0.0;
}

inline int Family::truncation() const {
  if (cat_ != Category::rdQM) throw domain_error("truncation is rdQM only");
  if (finite()) return N_;
  // smallest x with phi0(x)^2 < 1e-16 * max
  double mx = 0.0, w = 1.0;
  int x = 0;
  std::vector<double> ws{1.0};
  for (x = 1; x < 100000; ++x) {
    w *= B(double(x - 1)) / D(double(x));
    ws.push_back(w);
    mx = std::max(mx, w);
    if (w < 1e-16 * mx) break;
  }
  return x;
}

// ---------------------------------------------------------------------------
// alpha-consistency report: the over-determined recursion for the spectrum
// ---------------------------------------------------------------------------

struct AlphaReport {
  double max_residual_plus = 0.0;
  double max_residual_minus = 0.0;
  double min_discriminant = 0.0;
};

inline AlphaReport alpha_consistency(const Family& fam, int n_max) {
  if (n_max < 2) throw parameter_error("alpha_consistency needs n_max >= 2");
  ClosureData c = fam.closure();
  AlphaReport rep;
  rep.min_discriminant = 1e300;
  for (int n = 1; n < n_max; ++n) {
    double en = fam.energy(n);
    double disc = closure_discriminant(c, en);
    rep.min_discriminant = std::min(rep.min_discriminant, disc);
    double scale = std::max(1.0, std::abs(fam.energy(n + 1)));
    rep.max_residual_plus = std::max(
        rep.max_residual_plus, std::abs(alpha_plus(c, en) - (fam.energy(n + 1) - en)) / scale);
    rep.max_residual_minus = std::max(
        rep.max_residual_minus, std::abs(alpha_minus(c, en) - (fam.energy(n - 1) - en)) / scale);
  }
  return rep;
}

}  // namespace dqm
