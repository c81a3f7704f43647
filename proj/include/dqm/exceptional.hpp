#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "dqm/family.hpp"
#include "dqm/lattice.hpp"
#include "dqm/linalg.hpp"
#include "dqm/operators.hpp"
#include "dqm/polynomial.hpp"
#include "dqm/quadrature.hpp"
#include "dqm/random.hpp"

namespace dqm {

enum class XKind { XL1, XL2, XJ1, XJ2, XMP, XW, XAW, XM, XR, XqR };

inline const char* xkind_name(XKind k) {
  switch (k) {
    case XKind::XL1: return "XL1";
    case XKind::XL2: return "XL2";
    case XKind::XJ1: return "XJ1";
    case XKind::XJ2: return "XJ2";
    case XKind::XMP: return "XMP";
    case XKind::XW: return "XW";
    case XKind::XAW: return "XAW";
    case XKind::XM: return "XM";
    case XKind::XR: return "XR";
    case XKind::XqR: return "XqR";
  }
  return "?";
}

inline std::optional<XKind> xkind_from_name(const std::string& s) {
  for (XKind k : {XKind::XL1, XKind::XL2, XKind::XJ1, XKind::XJ2, XKind::XMP, XKind::XW,
                  XKind::XAW, XKind::XM, XKind::XR, XKind::XqR})
    if (s == xkind_name(k)) return k;
  return std::nullopt;
}

inline FamilyId xkind_base(XKind k) {
  switch (k) {
    case XKind::XL1:
    case XKind::XL2: return FamilyId::L;
    case XKind::XJ1:
    case XKind::XJ2: return FamilyId::J;
    case XKind::XMP: return FamilyId::MP;
    case XKind::XW: return FamilyId::W;
    case XKind::XAW: return FamilyId::AW;
    case XKind::XM: return FamilyId::M;
    case XKind::XR: return FamilyId::R;
    case XKind::XqR: return FamilyId::qR;
  }
  return FamilyId::M;
}

// ---------------------------------------------------------------------------
// rdQM deformations: XM, XR, XqR
// ---------------------------------------------------------------------------

class DeformedRdqm {
 public:
  static DeformedRdqm make(XKind kind, const Family& base, int ell) {
    if (kind != XKind::XM && kind != XKind::XR && kind != XKind::XqR)
      throw parameter_error("DeformedRdqm needs an rdQM deformation kind");
    if (xkind_base(kind) != base.id()) throw parameter_error("base family does not match the kind");
    if (ell < 0) throw parameter_error("ell must be non-negative");
    if (base.finite() && ell > base.N()) throw parameter_error("ell exceeds N");
    DeformedRdqm d(kind, base, ell);
    if (ell >= 1) {
      double zmin = d.xi_min_on_lattice();
      if (zmin <= 0.0)
        throw singularity_error("deforming polynomial changes sign on the lattice");
    }
    return d;
  }

  XKind kind() const { return kind_; }
  const Family& base() const { return base_; }
  int ell() const { return ell_; }
  int x_max_ell() const { return base_.finite() ? base_.N() - ell_ : -1; }
  int n_max_ell() const { return x_max_ell(); }
  const Family& base_l() const { return base_l_; }    // lambda + ell delta
  const Family& base_lt() const { return base_lt_; }  // lambda + ell delta + delta-tilde

  // deforming polynomial value; shifted selects lambda + delta
  template <class T>
  T xi_t(const T& x, bool shifted) const {
    const Family& f = shifted ? base_up_ : base_;
    switch (kind_) {
      case XKind::XM: {
        // c^ell M_ell(-(x+beta+ell-1); beta+ell-1, c)
        T beta = T(f.par("beta") + ell_ - 1.0);
        T c = T(f.par("c"));
        T arg = -(x + beta);
        T val = kernels::meixner(ell_, arg, beta, c);
        return pow_like(c, ell_) * val;
      }
      case XKind::XR: {
        double a = -double(f.N()), b = f.par("b"), c = f.par("c"), dd = f.par("d");
        // twist of lambda + (ell-1) delta: (d-a, d-b, c+ell-1, d+ell-1)
        return kernels::racah(ell_, x, T(dd - a), T(dd - b), T(c + ell_ - 1.0),
                              T(dd + ell_ - 1.0));
      }
      case XKind::XqR: {
        double q = f.q();
        double a = std::pow(q, -double(f.N()));
        double b = f.par("b"), c = f.par("c"), dd = f.par("d");
        double ql = std::pow(q, double(ell_ - 1));
        return kernels::q_racah(ell_, x, T(dd / a), T(dd / b), T(c * ql), T(dd * ql), T(q));
      }
      default: return T(1.0);
    }
  }
  double xi(double x, bool shifted) const { return to_double(xi_t<DDouble>(DDouble(x), shifted)); }

  // deformed potentials
  double B_l(double x) const {
    if (base_.finite() && std::abs(x - (base_.N() - ell_)) < 1e-12) return 0.0;
    return base_l_.B(x) * (xi(x, false) / xi(x + 1.0, false)) *
           (xi(x + 1.0, true) / xi(x, true));
  }
  double D_l(double x) const {
    if (std::abs(x) < 1e-12) return 0.0;
    return base_l_.D(x) * (xi(x + 1.0, false) / xi(x, false)) *
           (xi(x - 1.0, true) / xi(x, true));
  }

  // weight of the deformed orthogonality: psi_ell(x)^2 / xi(1)
  double weight(int x) const {
    return base_l_.phi0_squared_lattice(x) / (xi(double(x), false) * xi(double(x + 1), false));
  }

  double energy(int n) const { return base_l_.energy(n); }

  // v-factors of B and D at given parameter point
  double v1B(const Family& f, double x) const {
    switch (kind_) {
      case XKind::XM: return -std::sqrt(f.par("c"));
      case XKind::XR: {
        double a = -double(f.N()), b = f.par("b"), dd = f.par("d");
        return (x + a) * (x + b) / dd;
      }
      default: {
        double q = f.q(), b = f.par("b"), dd = f.par("d");
        double aqx = std::pow(q, x - f.N());
        return std::pow(q, -x) / (1.0 - dd) * (1.0 - aqx) * (1.0 - b * std::pow(q, x));
      }
    }
  }
  double v2B(const Family& f, double x) const {
    switch (kind_) {
      case XKind::XM: return f.B(x) / std::sqrt(f.par("c"));
      case XKind::XR: {
        double c = f.par("c"), dd = f.par("d");
        return (x + c) * (x + dd) / dd;
      }
      default: {
        double q = f.q(), c = f.par("c"), dd = f.par("d");
        double qx = std::pow(q, x);
        return std::pow(q, -x) / (1.0 - dd) * (1.0 - c * qx) * (1.0 - dd * qx);
      }
    }
  }
  double v1D(const Family& f, double x) const {
    switch (kind_) {
      case XKind::XM: return -1.0 / std::sqrt(f.par("c"));
      case XKind::XR: {
        double a = -double(f.N()), b = f.par("b"), dd = f.par("d");
        return (x + dd - a) * (x + dd - b) / dd;
      }
      default: {
        double q = f.q(), b = f.par("b"), dd = f.par("d");
        double a = std::pow(q, -double(f.N()));
        double adqx = dd * std::pow(q, x + f.N());
        return std::pow(q, -x) / (1.0 - dd) * (a * b / dd) * (1.0 - adqx) *
               (1.0 - dd / b * std::pow(q, x));
      }
    }
  }
  double v2D(const Family& f, double x) const {
    switch (kind_) {
      case XKind::XM: return std::sqrt(f.par("c")) * f.D(x);
      case XKind::XR: {
        double c = f.par("c"), dd = f.par("d");
        return (x + dd - c) * x / dd;
      }
      default: {
        double q = f.q(), c = f.par("c"), dd = f.par("d");
        double qx = std::pow(q, x);
        return std::pow(q, -x) / (1.0 - dd) * c * (1.0 - dd / c * qx) * (1.0 - qx);
      }
    }
  }

  double fhat(int n) const {
    switch (kind_) {
      case XKind::XM: {
        double b = base_.par("beta"), c = base_.par("c");
        return (1.0 - c) / std::sqrt(c) * (b + n + 2.0 * ell_ - 1.0) / (b + ell_ - 1.0);
      }
      case XKind::XR: {
        double a = -double(base_.N()), b = base_.par("b"), c = base_.par("c"),
               dd = base_.par("d");
        return (a + b - dd + n) * (c + 2.0 * ell_ + n - 1.0) / (c + ell_ - 1.0);
      }
      default: {
        double q = base_.q();
        double a = std::pow(q, -double(base_.N()));
        double b = base_.par("b"), c = base_.par("c"), dd = base_.par("d");
        return std::pow(q, -n) * (1.0 - a * b / dd * std::pow(q, n)) *
               (1.0 - c * std::pow(q, 2.0 * ell_ + n - 1.0)) / (1.0 - c * std::pow(q, ell_ - 1.0));
      }
    }
  }
  double bhat(int /*n*/) const {
    switch (kind_) {
      case XKind::XM: {
        double b = base_.par("beta"), c = base_.par("c");
        return std::sqrt(c) / (1.0 - c) * (b + ell_ - 1.0);
      }
      case XKind::XR: return base_.par("c") + ell_ - 1.0;
      default: return 1.0 - base_.par("c") * std::pow(base_.q(), ell_ - 1.0);
    }
  }
  double s_l() const {
    switch (kind_) {
      case XKind::XM: {
        double b = base_.par("beta"), c = base_.par("c");
        return (1.0 - c) / c / (b + ell_ - 1.0);
      }
      case XKind::XR: {
        double a = -double(base_.N()), b = base_.par("b"), c = base_.par("c"),
               dd = base_.par("d");
        return -(dd - a) * (dd - b) / ((c + ell_ - 1.0) * (dd + ell_));
      }
      default: {
        double q = base_.q();
        double a = std::pow(q, -double(base_.N()));
        double b = base_.par("b"), c = base_.par("c"), dd = base_.par("d");
        return -a * b / dd * std::pow(q, ell_) * (1.0 - dd / a) * (1.0 - dd / b) /
               ((1.0 - c * std::pow(q, ell_ - 1.0)) * (1.0 - dd * std::pow(q, ell_)));
      }
    }
  }
  double kappa_hat() const {
    if (kind_ != XKind::XqR) return 1.0;
    double q = base_.q();
    double a = std::pow(q, -double(base_.N()));
    return 1.0 / (a * base_.par("b") / base_.par("d") * std::pow(q, ell_));
  }
  double s_hat() const {
    double f = kappa_hat();
    switch (kind_) {
      case XKind::XM: return f * (base_.par("beta") + ell_ - 1.0);
      case XKind::XR: return f * (base_.par("c") + ell_ - 1.0);
      default: return f * (1.0 - base_.par("c") * std::pow(base_.q(), ell_ - 1.0));
    }
  }

  // norm constants of the deformed orthogonality
  double norm_constant(int n) const {
    return base_lt_.norm_constant(n) * fhat(n) / bhat(n) / s_l();
  }

  // X polynomial on the lattice (normalized P_{ell,n}(0) = 1)
  template <class T>
  T P_t(int n, const T& x) const {
    if (ell_ == 0) return base_.P_lattice_t<T>(n, x);
    T vb, vd;
    switch (kind_) {
      case XKind::XM: {
        T c = T(base_l_.par("c"));
        vb = -sqrt_only(c);
        vd = T(-1.0) / sqrt_only(c);
        break;
      }
      case XKind::XR: {
        T a = T(-double(base_l_.N())), b = T(base_l_.par("b")), dd = T(base_l_.par("d"));
        vb = (x + a) * (x + b) / dd;
        vd = (x + dd - a) * (x + dd - b) / dd;
        break;
      }
      default: {
        double q = base_l_.q();
        T b = T(base_l_.par("b")), dd = T(base_l_.par("d"));
        T qmx = T(1.0) / kernels::qpow(T(q), to_double(x));
        T qx = kernels::qpow(T(q), to_double(x));
        T aqx = kernels::qpow(T(q), to_double(x) - base_l_.N());
        T adqx = dd * kernels::qpow(T(q), to_double(x) + base_l_.N());
        T a = kernels::qpow(T(q), double(-base_l_.N()));
        vb = qmx / (T(1.0) - dd) * (T(1.0) - aqx) * (T(1.0) - b * qx);
        vd = qmx / (T(1.0) - dd) * (a * b / dd) * (T(1.0) - adqx) * (T(1.0) - dd / b * qx);
        break;
      }
    }
    T phi = base_lt_.varphi_t(x);
    T num = vb * xi_t(x, false) * base_lt_.P_lattice_t<T>(n, x + T(1.0)) -
            vd * xi_t(x + T(1.0), false) * base_lt_.P_lattice_t<T>(n, x);
    return num / (T(fhat(n)) * phi);
  }
  double P(int n, double x) const {
    if (std::abs(x - std::round(x)) < 1e-9)
      return to_double(P_t<DDouble>(n, DDouble(std::round(x))));
    return P_t<double>(n, x);  // continued off-lattice evaluation
  }

  double xi_min_on_lattice() const {
    int top = base_.finite() ? base_.N() - ell_ + 1 : base_.truncation() + 2;
    double mn = 1e300;
    for (int x = 0; x <= top; ++x) {
      mn = std::min(mn, xi(double(x), false));
      mn = std::min(mn, xi(double(x), true));
    }
    return mn;
  }

 private:
  DeformedRdqm(XKind kind, const Family& base, int ell)
      : kind_(kind),
        base_(base),
        base_up_(base.shifted(1)),
        base_l_(base.shifted(ell)),
        base_lt_(ell == 0 ? base : make_base_lt(kind, base, ell)),
        ell_(ell) {}

  static Family make_base_lt(XKind kind, const Family& base, int ell) {
    ParameterVector pv = base.params();
    switch (kind) {
      case XKind::XM:
        pv.values["beta"] += ell - 1;
        return Family::make(FamilyId::M, pv);
      case XKind::XR:
        pv.values["b"] += ell;
        pv.values["c"] += ell - 1;
        pv.values["d"] += ell - 1;
        pv.N = base.N() - ell;
        return Family::make(FamilyId::R, pv);
      default: {
        double q = base.q();
        pv.values["b"] *= std::pow(q, ell);
        pv.values["c"] *= std::pow(q, ell - 1);
        pv.values["d"] *= std::pow(q, ell - 1);
        pv.N = base.N() - ell;
        return Family::make(FamilyId::qR, pv);
      }
    }
  }

  template <class T>
  static T sqrt_only(const T& x) {
    if constexpr (std::is_same_v<T, DDouble>)
      return sqrt(x);
    else
      return std::sqrt(x);
  }

  XKind kind_;
  Family base_, base_up_, base_l_, base_lt_;
  int ell_;
};

// deformed Hamiltonian matrix
inline JacobiMatrix build_deformed_hamiltonian(const DeformedRdqm& d) {
  int dim;
  if (d.base().finite()) {
    dim = d.base().N() - d.ell() + 1;
  } else {
    dim = gram_extent(d.base_l(), reliable_modes(d.base_l())) + 9;
  }
  std::vector<double> bs(dim), ds(dim);
  for (int x = 0; x < dim; ++x) {
    bs[x] = d.B_l(double(x));
    ds[x] = d.D_l(double(x));
  }
  return matrix_from_bd(bs, ds);
}

inline double deformed_spectrum_residual(const DeformedRdqm& d) {
  JacobiMatrix m = build_deformed_hamiltonian(d);
  SpectralDecomposition sd = eigendecompose(m);
  return spectrum_residual(d.base_l(), sd);
}

// eigenvectors of the deformed matrix vs psi_ell P_{ell,n}
inline double deformed_eigenvector_residual(const DeformedRdqm& d) {
  JacobiMatrix m = build_deformed_hamiltonian(d);
  SpectralDecomposition sd = eigendecompose(m);
  int n_check = std::min(reliable_modes(d.base_l()), m.dim);
  double worst = 0.0;
  for (int n = 0; n < n_check; ++n) {
    std::vector<double> u(m.dim);
    double nrm = 0.0;
    for (int x = 0; x < m.dim; ++x) {
      u[x] = std::sqrt(std::abs(d.weight(x))) * d.P(n, double(x));
      nrm += u[x] * u[x];
    }
    if (!d.base().finite()) {
      double edge = std::abs(u[m.dim - 1]) / std::sqrt(nrm);
      if (edge > 1e-10) continue;
    }
    nrm = std::sqrt(nrm);
    for (int x = 0; x < m.dim; ++x)
      worst = std::max(worst, std::abs(sd.eigenvectors(x, n) - u[x] / nrm));
  }
  return worst;
}

// Gram residual against the closed-form deformed norms
inline double deformed_orthogonality_residual(const DeformedRdqm& d, int n_max = -1) {
  int xmax, nmax;
  if (d.base().finite()) {
    xmax = d.x_max_ell();
    nmax = (n_max < 0) ? d.n_max_ell() : n_max;
  } else {
    nmax = (n_max < 0) ? std::min(8, reliable_modes(d.base_l())) : n_max;
    xmax = gram_extent(d.base_l(), nmax) + 6;
  }
  std::vector<double> dn(nmax + 1);
  for (int n = 0; n <= nmax; ++n) dn[n] = std::sqrt(d.norm_constant(n));
  double worst = 0.0;
  std::vector<std::vector<double>> pv(nmax + 1, std::vector<double>(xmax + 1));
  std::vector<double> w(xmax + 1);
  for (int x = 0; x <= xmax; ++x) w[x] = d.weight(x);
  for (int n = 0; n <= nmax; ++n)
    for (int x = 0; x <= xmax; ++x) pv[n][x] = d.P(n, double(x));
  for (int n = 0; n <= nmax; ++n)
    for (int m = n; m <= nmax; ++m) {
      DDouble s(0.0);
      for (int x = 0; x <= xmax; ++x) s += DDouble(w[x]) * DDouble(pv[n][x]) * DDouble(pv[m][x]);
      double g = to_double(s) * dn[n] * dn[m];
      worst = std::max(worst, std::abs(g - (n == m ? 1.0 : 0.0)));
    }
  return worst;
}

// auxiliary function varphi at a raw parameter point (avoids constructing a
// Family where the unitary ranges need not hold)
inline double varphi_raw(FamilyId id, double x, double dpar, double q) {
  switch (id) {
    case FamilyId::M: return 1.0;
    case FamilyId::R: return (2.0 * x + dpar + 1.0) / (dpar + 1.0);
    default: return (std::pow(q, -x) - dpar * std::pow(q, x + 1.0)) / (1.0 - dpar * q);
  }
}

// d-parameter at lambda + m delta + delta-tilde
inline double dpar_shift_tilde(const Family& base, int m) {
  switch (base.id()) {
    case FamilyId::M: return 0.0;
    case FamilyId::R: return base.par("d") + m - 1.0;
    default: return base.par("d") * std::pow(base.q(), m - 1.0);
  }
}

// ---------------------------------------------------------------------------
// xi identities, difference equation
// ---------------------------------------------------------------------------

struct XiIdentityReport {
  double forward = 0.0;   // v1-type identity
  double backward = 0.0;  // v2-type identity
  double diffeq = 0.0;    // second-order equation for xi
};

inline XiIdentityReport xi_identities_rdqm(const DeformedRdqm& d) {
  XiIdentityReport rep;
  const Family& base = d.base();
  int ell = d.ell();
  if (ell == 0) return rep;
  Family lam_l = base.shifted(ell);            // lambda + ell delta
  Family lam_lm1 = ell >= 1 ? base.shifted(ell - 1) : base;
  double da = dpar_shift_tilde(base, ell);       // lambda + ell delta + delta-tilde
  double db = dpar_shift_tilde(base, ell - 1);   // lambda + (ell-1) delta + delta-tilde
  int top = base.finite() ? base.N() - ell : 16;
  for (int x = 0; x <= top; ++x) {
    double xx = double(x);
    // forward: (v1B(l+ld) xi(x;l) - v1D(l+ld) xi(x+1;l)) / varphi = fhat0 xi(x;l+d)
    double lhs1 = (d.v1B(lam_l, xx) * d.xi(xx, false) - d.v1D(lam_l, xx) * d.xi(xx + 1.0, false)) /
                  varphi_raw(base.id(), xx, da, base.q());
    double rhs1 = d.fhat(0) * d.xi(xx, true);
    rep.forward = std::max(rep.forward,
                           std::abs(lhs1 - rhs1) / std::max({1.0, std::abs(lhs1), std::abs(rhs1)}));
    // backward: (v2B(l+(l-1)d) xi(x;l+d) - v2D(l+(l-1)d) xi(x-1;l+d)) / varphi = bhat0 xi(x;l)
    double lhs2 = (d.v2B(lam_lm1, xx) * d.xi(xx, true) - d.v2D(lam_lm1, xx) * d.xi(xx - 1.0, true)) /
                  varphi_raw(base.id(), xx, db, base.q());
    double rhs2 = d.bhat(0) * d.xi(xx, false);
    rep.backward = std::max(
        rep.backward, std::abs(lhs2 - rhs2) / std::max({1.0, std::abs(lhs2), std::abs(rhs2)}));
    // difference equation with the twisted potentials
    double Bt, Dt, Et;
    switch (d.kind()) {
      case XKind::XM: {
        double bet = base.par("beta") + ell - 1.0;
        Family tw = [&] {
          ParameterVector pv = base.params();
          pv.values["beta"] = bet;
          return Family::make(FamilyId::M, pv);
        }();
        Bt = -tw.D(-(xx + bet));
        Dt = -tw.B(-(xx + bet));
        Et = -base.energy(ell);
        break;
      }
      case XKind::XR: {
        double a = -double(base.N()), b = base.par("b"), c = base.par("c"), dd = base.par("d");
        // twisted parameters (d-a, d-b, c+ell-1, d+ell-1), additive Racah forms
        double ta = dd - a, tb = dd - b, tc = c + ell - 1.0, td = dd + ell - 1.0;
        auto Bf = [&](double y) {
          return -(y + ta) * (y + tb) * (y + tc) * (y + td) /
                 ((2.0 * y + td) * (2.0 * y + 1.0 + td));
        };
        auto Df = [&](double y) {
          return -(y + td - ta) * (y + td - tb) * (y + td - tc) * y /
                 ((2.0 * y - 1.0 + td) * (2.0 * y + td));
        };
        Bt = Bf(xx);
        Dt = Df(xx);
        double tdt = ta + tb + tc - td - 1.0;
        Et = double(ell) * (ell + tdt);
        break;
      }
      default: {
        double q = base.q();
        double a = std::pow(q, -double(base.N()));
        double b = base.par("b"), c = base.par("c"), dd = base.par("d");
        double ql = std::pow(q, double(ell - 1));
        double ta = dd / a, tb = dd / b, tc = c * ql, td = dd * ql;
        auto Bf = [&](double y) {
          double qy = std::pow(q, y);
          return -(1.0 - ta * qy) * (1.0 - tb * qy) * (1.0 - tc * qy) * (1.0 - td * qy) /
                 ((1.0 - td * qy * qy) * (1.0 - td * qy * qy * q));
        };
        auto Df = [&](double y) {
          double qy = std::pow(q, y);
          double tdt = ta * tb * tc / (td * q);
          return -tdt * (1.0 - td / ta * qy) * (1.0 - td / tb * qy) * (1.0 - td / tc * qy) *
                 (1.0 - qy) / ((1.0 - td * qy * qy / q) * (1.0 - td * qy * qy));
        };
        Bt = Bf(xx);
        Dt = Df(xx);
        double tdt = ta * tb * tc / (td * q);
        Et = (std::pow(q, -double(ell)) - 1.0) * (1.0 - tdt * std::pow(q, double(ell)));
        break;
      }
    }
    double lhs3 = Bt * (d.xi(xx, false) - d.xi(xx + 1.0, false)) +
                  Dt * (d.xi(xx, false) - d.xi(xx - 1.0, false));
    double rhs3 = Et * d.xi(xx, false);
    rep.diffeq = std::max(rep.diffeq,
                          std::abs(lhs3 - rhs3) / std::max({1.0, std::abs(lhs3), std::abs(rhs3)}));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Intertwiners
// ---------------------------------------------------------------------------

struct IntertwinerReport {
  double hplus = 0.0;       // Ahat^dag Ahat = kappa-hat (H(l+ld+dt) + fhat0 bhat0)
  double hminus = 0.0;      // Ahat Ahat^dag = kappa-hat (H_l + fhat0 bhat0)
  double fhat_action = 0.0; // Fhat P_n = fhat_n P_{l,n}
  double bhat_action = 0.0; // Bhat P_{l,n} = bhat_n P_n
  double energy_split = 0.0;// E_n(l+ld) = fhat_n bhat_n - fhat_0 bhat_0
  double shift_intertwine = 0.0;  // shat-weighted F-intertwining relations
};

inline IntertwinerReport intertwiner_check_rdqm(const DeformedRdqm& d) {
  IntertwinerReport rep;
  const Family& base = d.base();
  int ell = d.ell();
  Family lam_lm1 = ell >= 1 ? base.shifted(ell - 1) : base;
  const Family& blt = d.base_lt();
  int dim = base.finite() ? base.N() - ell + 1
                          : std::min(build_deformed_hamiltonian(d).dim, 48);

  // Bhat_l(x), Dhat_l(x)
  auto bhat_pot = [&](double x) {
    double tw;
    if (d.kind() == XKind::XM) {
      double bet = base.par("beta") + ell - 1.0;
      Family twf = [&] {
        ParameterVector pv = base.params();
        pv.values["beta"] = bet;
        return Family::make(FamilyId::M, pv);
      }();
      tw = -twf.D(-(x + bet));
    } else if (d.kind() == XKind::XR) {
      double a = -double(base.N()), b = base.par("b"), c = base.par("c"), dd = base.par("d");
      double ta = dd - a, tb = dd - b, tc = c + ell - 1.0, td = dd + ell - 1.0;
      tw = -(x + ta) * (x + tb) * (x + tc) * (x + td) / ((2.0 * x + td) * (2.0 * x + 1.0 + td));
    } else {
      double q = base.q();
      double a = std::pow(q, -double(base.N()));
      double b = base.par("b"), c = base.par("c"), dd = base.par("d");
      double ql = std::pow(q, double(ell - 1));
      double ta = dd / a, tb = dd / b, tc = c * ql, td = dd * ql;
      double qy = std::pow(q, x);
      tw = -(1.0 - ta * qy) * (1.0 - tb * qy) * (1.0 - tc * qy) * (1.0 - td * qy) /
           ((1.0 - td * qy * qy) * (1.0 - td * qy * qy * q));
    }
    return d.xi(x + 1.0, false) / d.xi(x, false) * tw;
  };
  auto dhat_pot = [&](double x) {
    double tw;
    if (d.kind() == XKind::XM) {
      double bet = base.par("beta") + ell - 1.0;
      Family twf = [&] {
        ParameterVector pv = base.params();
        pv.values["beta"] = bet;
        return Family::make(FamilyId::M, pv);
      }();
      tw = -twf.B(-(x + bet));
    } else if (d.kind() == XKind::XR) {
      double a = -double(base.N()), b = base.par("b"), c = base.par("c"), dd = base.par("d");
      double ta = dd - a, tb = dd - b, tc = c + ell - 1.0, td = dd + ell - 1.0;
      tw = -(x + td - ta) * (x + td - tb) * (x + td - tc) * x /
           ((2.0 * x - 1.0 + td) * (2.0 * x + td));
    } else {
      double q = base.q();
      double a = std::pow(q, -double(base.N()));
      double b = base.par("b"), c = base.par("c"), dd = base.par("d");
      double ql = std::pow(q, double(ell - 1));
      double ta = dd / a, tb = dd / b, tc = c * ql, td = dd * ql;
      double tdt = ta * tb * tc / (td * q);
      double qy = std::pow(q, x);
      tw = -tdt * (1.0 - td / ta * qy) * (1.0 - td / tb * qy) * (1.0 - td / tc * qy) * (1.0 - qy) /
           ((1.0 - td * qy * qy / q) * (1.0 - td * qy * qy));
    }
    return d.xi(x - 1.0, false) / d.xi(x, false) * tw;
  };

  // matrices: Ahat on the reduced lattice, H(lambda + ell delta + delta-tilde), H_l
  double kh = d.kappa_hat();
  double f0b0 = d.fhat(0) * d.bhat(0);
  DMat ahat(dim, dim), hplus(dim, dim), hminus(dim, dim);
  for (int x = 0; x < dim; ++x) {
    ahat(x, x) = std::sqrt(std::max(0.0, bhat_pot(double(x))));
    if (x + 1 < dim) ahat(x, x + 1) = -std::sqrt(std::max(0.0, dhat_pot(double(x + 1))));
    double bb = blt.B(double(x)), dd2 = blt.D(double(x));
    if (blt.finite() && x == dim - 1) bb = 0.0;
    hplus(x, x) = bb + dd2;
    if (x + 1 < dim) {
      double off = -std::sqrt(std::max(0.0, blt.B(double(x)) * blt.D(double(x + 1))));
      hplus(x, x + 1) = off;
      hplus(x + 1, x) = off;
    }
    double bl = d.B_l(double(x)), dl = d.D_l(double(x));
    hminus(x, x) = bl + dl;
    if (x + 1 < dim) {
      double off = -std::sqrt(std::max(0.0, d.B_l(double(x)) * d.D_l(double(x + 1))));
      hminus(x, x + 1) = off;
      hminus(x + 1, x) = off;
    }
  }
  // top corner of Ahat Ahat^dag needs Dhat(dim), which vanishes for finite
  DMat lhs_p = ahat.transpose() * ahat;
  DMat lhs_m = ahat * ahat.transpose();
  if (!base.finite()) {
    // the corner entry picks up Dhat(dim) on the infinite lattice
    lhs_m(dim - 1, dim - 1) += dhat_pot(double(dim));
  }
  DMat rhs_p = (hplus + DMat::identity(dim) * f0b0) * kh;
  DMat rhs_m = (hminus + DMat::identity(dim) * f0b0) * kh;
  int limit = base.finite() ? dim : dim - 4;
  double hs = std::max(1.0, max_abs(rhs_p));
  rep.hplus = detail::max_abs_block(lhs_p - rhs_p, limit) / hs;
  rep.hminus = detail::max_abs_block(lhs_m - rhs_m, limit) / hs;

  // Fhat / Bhat actions on the polynomials
  int n_top = base.finite() ? std::min(4, d.n_max_ell()) : 4;
  for (int n = 0; n <= n_top; ++n) {
    double scale = 0.0, w1 = 0.0, w2 = 0.0;
    for (int x = 0; x <= std::min(dim - 2, 14); ++x) {
      double xx = double(x);
      double fhat_lhs = (d.v1B(d.base_l(), xx) * d.xi(xx, false) * blt.P(n, xx + 1.0) -
                         d.v1D(d.base_l(), xx) * d.xi(xx + 1.0, false) * blt.P(n, xx)) /
                        blt.varphi(xx);
      double fhat_rhs = d.fhat(n) * d.P(n, xx);
      scale = std::max({scale, std::abs(fhat_rhs), 1.0});
      w1 = std::max(w1, std::abs(fhat_lhs - fhat_rhs));
      double phb = varphi_raw(base.id(), xx, dpar_shift_tilde(base, ell - 1), base.q());
      double bhat_lhs = (d.v2B(lam_lm1, xx) * d.P(n, xx) -
                         d.v2D(lam_lm1, xx) * d.P(n, xx - 1.0)) /
                        (d.xi(xx, false) * phb);
      double bhat_rhs = d.bhat(n) * blt.P(n, xx);
      w2 = std::max(w2, std::abs(bhat_lhs - bhat_rhs) / std::max({1.0, std::abs(bhat_rhs)}));
    }
    rep.fhat_action = std::max(rep.fhat_action, w1 / scale);
    rep.bhat_action = std::max(rep.bhat_action, w2);
    // (c): energy split
    double lhs = blt.energy(n) + f0b0;
    double rhs = d.fhat(n) * d.bhat(n);
    rep.energy_split =
        std::max(rep.energy_split, std::abs(lhs - rhs) / std::max({1.0, std::abs(rhs)}));
  }

  // (d): shift-operator intertwining with the s-hat factors
  DeformedRdqm d_up = DeformedRdqm::make(d.kind(), base.shifted(1), ell);
  for (int n = 1; n <= std::min(3, n_top); ++n) {
    auto Pn = [&](double x) { return blt.P(n, x); };
    // base forward shift at lambda + ell delta + delta-tilde
    auto Fb = [&](double x) { return blt.B(0.0) * (Pn(x) - Pn(x + 1.0)) / blt.varphi(x); };
    // Fhat of the shifted deformation applied to that
    auto lhs_fn = [&](double x) {
      double ph = varphi_raw(base.id(), x, dpar_shift_tilde(base.shifted(1), ell), base.q());
      return d_up.s_hat() *
             (d_up.v1B(d_up.base_l(), x) * d_up.xi(x, false) * Fb(x + 1.0) -
              d_up.v1D(d_up.base_l(), x) * d_up.xi(x + 1.0, false) * Fb(x)) /
             ph;
    };
    // Fhat of this deformation, then the deformed forward shift F_l(lambda)
    auto Fh = [&](double x) {
      double ph = varphi_raw(base.id(), x, dpar_shift_tilde(base, ell), base.q());
      return (d.v1B(d.base_l(), x) * d.xi(x, false) * Pn(x + 1.0) -
              d.v1D(d.base_l(), x) * d.xi(x + 1.0, false) * Pn(x)) /
             ph;
    };
    auto rhs_fn = [&](double x) {
      return d.s_hat() * d.base_l().B(0.0) / (d.base_l().varphi(x) * d.xi(x + 1.0, false)) *
             (d.xi(x + 1.0, true) * Fh(x) - d.xi(x, true) * Fh(x + 1.0));
    };
    double w = 0.0, sc = 1.0;
    for (int x = 0; x <= std::min(dim - 3, 10); ++x) {
      double a = lhs_fn(double(x)), b = rhs_fn(double(x));
      sc = std::max({sc, std::abs(a), std::abs(b)});
      w = std::max(w, std::abs(a - b));
    }
    rep.shift_intertwine = std::max(rep.shift_intertwine, w / sc);
  }
  return rep;
}

// deformed shape invariance in the (B_l, D_l) replacement form
inline ShapeInvarianceResidual deformed_shape_invariance_rdqm(const DeformedRdqm& d) {
  DeformedRdqm up = DeformedRdqm::make(d.kind(), d.base().shifted(1), d.ell());
  double kp = d.base().kappa();
  int x_max = d.base().finite() ? d.base().N() - d.ell() - 1 : 18;
  ShapeInvarianceResidual r;
  for (int x = 0; x <= x_max; ++x) {
    double l1 = d.B_l(double(x + 1)) * d.D_l(double(x + 1));
    double r1 = kp * kp * up.B_l(double(x)) * up.D_l(double(x + 1));
    r.multiplicative =
        std::max(r.multiplicative, std::abs(l1 - r1) / std::max({1.0, std::abs(l1), std::abs(r1)}));
    double l2 = d.B_l(double(x)) + d.D_l(double(x + 1));
    double r2 = kp * (up.B_l(double(x)) + up.D_l(double(x))) + d.energy(1);
    r.additive = std::max(r.additive, std::abs(l2 - r2) / std::max({1.0, std::abs(l2), std::abs(r2)}));
  }
  return r;
}

// degree = ell + n in eta, and exactly n sign changes on the reduced lattice
struct ZeroDegreeReport {
  int sign_changes = 0;
  bool degree_ok = false;
};

inline ZeroDegreeReport zero_degree_check_rdqm(const DeformedRdqm& d, int n) {
  ZeroDegreeReport rep;
  int xmax = d.base().finite() ? d.x_max_ell() : gram_extent(d.base_l(), n + d.ell()) + 2;
  double prev = d.P(n, 0.0);
  for (int x = 1; x <= xmax; ++x) {
    double cur = d.P(n, double(x));
    if (prev * cur < 0.0) ++rep.sign_changes;
    if (cur != 0.0) prev = cur;
  }
  // degree fit in eta at lambda + ell delta
  const Family& fl = d.base_l();
  int deg = d.ell() + n;
  int pts = deg + 3;
  auto [xlo, xhi] = sample_window(fl);
  double elo = fl.eta(xlo), ehi = fl.eta(xhi);
  std::vector<double> targets = chebyshev_points(pts, elo, ehi);
  std::vector<double> us(pts), vals(pts);
  double ctr = 0.5 * (elo + ehi), rad = 0.5 * (ehi - elo);
  for (int i = 0; i < pts; ++i) {
    double x = invert_eta(fl, targets[i], xlo, xhi);
    us[i] = (fl.eta(x) - ctr) / rad;
    vals[i] = d.P(n, x);
  }
  auto c = fit_polynomial(us, vals, deg + 1);
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  rep.degree_ok = std::abs(c[deg]) > 1e-7 * scale && std::abs(c[deg + 1]) <= 1e-7 * scale;
  return rep;
}

// three-term witness: eta P_{l,1} fitted against {P_{l,0}, P_{l,1}, P_{l,2}}
// leaves an O(1) residual for ell >= 1
inline double no_three_term_residual_rdqm(const DeformedRdqm& d) {
  // weighted least squares in the physical norm: the residual is the sine of
  // the angle between eta P_{l,1} and span{P_{l,0}, P_{l,1}, P_{l,2}}
  const Family& fl = d.base_l();
  int xmax = d.base().finite() ? d.x_max_ell() : gram_extent(fl, d.ell() + 3) + 4;
  int pts = xmax + 1;
  DMat m(pts, 3);
  std::vector<double> rhs(pts);
  double nrm = 0.0;
  for (int x = 0; x < pts; ++x) {
    double sw = std::sqrt(std::abs(d.weight(x)));
    m(x, 0) = sw * d.P(2, double(x));
    m(x, 1) = sw * d.P(1, double(x));
    m(x, 2) = sw * d.P(0, double(x));
    rhs[x] = sw * fl.eta(double(x)) * d.P(1, double(x));
    nrm += rhs[x] * rhs[x];
  }
  double res;
  solve_least_squares(m, rhs, &res);
  return res / std::sqrt(std::max(nrm, 1e-300));
}

}  // namespace dqm
// ---------------------------------------------------------------------------
// oQM deformations: XL1, XL2, XJ1, XJ2 (coefficient polynomials in eta)
// ---------------------------------------------------------------------------

namespace dqm {

class DeformedOqm {
 public:
  static DeformedOqm make(XKind kind, const Family& base, int ell) {
    if (kind != XKind::XL1 && kind != XKind::XL2 && kind != XKind::XJ1 && kind != XKind::XJ2)
      throw parameter_error("DeformedOqm needs an oQM deformation kind");
    if (xkind_base(kind) != base.id()) throw parameter_error("base family does not match the kind");
    if (ell < 0) throw parameter_error("ell must be non-negative");
    DeformedOqm d(kind, base, ell);
    if (ell >= 1) {
      Poly xi = d.xi_coeffs(false);
      double cs = 0.0;
      for (double v : xi) cs = std::max(cs, std::abs(v));
      if (int(xi.size()) - 1 != ell || std::abs(xi.back()) < 1e-10 * cs)
        throw parameter_error("deforming polynomial degenerates at these parameters");
      if (d.xi_min_on_domain() <= 0.0)
        throw singularity_error("deforming polynomial changes sign on the domain");
    }
    return d;
  }

  XKind kind() const { return kind_; }
  const Family& base() const { return base_; }
  int ell() const { return ell_; }
  double g() const { return base_.par("g"); }
  double h() const { return base_.id() == FamilyId::J ? base_.par("h") : 0.0; }
  bool is_l() const { return base_.id() == FamilyId::L; }
  double sign() const { return (kind_ == XKind::XL1 || kind_ == XKind::XJ1) ? 1.0 : -1.0; }

  // xi as eta-coefficients at lambda (+delta when shifted)
  Poly xi_coeffs(bool shifted) const {
    double gg = g() + (shifted ? 1.0 : 0.0);
    double hh = h() + (shifted ? 1.0 : 0.0);
    switch (kind_) {
      case XKind::XL1: {
        Poly c = laguerre_poly_coeffs(ell_, gg + ell_ - 1.5);
        for (size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
        return c;
      }
      case XKind::XL2: return laguerre_poly_coeffs(ell_, -gg - ell_ - 0.5);
      case XKind::XJ1: return jacobi_poly_coeffs(ell_, gg + ell_ - 1.5, -hh - ell_ - 0.5);
      default: return jacobi_poly_coeffs(ell_, -gg - ell_ - 0.5, hh + ell_ - 1.5);
    }
  }

  // P_n at lambda + ell delta + delta-tilde
  Poly pn_coeffs(int n) const {
    switch (kind_) {
      case XKind::XL1: return laguerre_poly_coeffs(n, g() + ell_ - 1.5);
      case XKind::XL2: return laguerre_poly_coeffs(n, g() + ell_ + 0.5);
      case XKind::XJ1: return jacobi_poly_coeffs(n, g() + ell_ - 1.5, h() + ell_ + 0.5);
      default: return jacobi_poly_coeffs(n, g() + ell_ + 0.5, h() + ell_ - 1.5);
    }
  }

  double d1(double shift_units) const {
    switch (kind_) {
      case XKind::XL1: return 1.0;
      case XKind::XL2:
      case XKind::XJ2: return g() + shift_units + 0.5;
      default: return h() + shift_units + 0.5;
    }
  }
  Poly d2() const {
    switch (kind_) {
      case XKind::XL1: return {1.0};
      case XKind::XL2: return {0.0, -1.0};
      case XKind::XJ1: return {-1.0, -1.0};
      default: return {1.0, -1.0};
    }
  }
  Poly c2_over_d2() const {
    switch (kind_) {
      case XKind::XL1: return {0.0, 1.0};
      case XKind::XL2: return {-1.0};
      case XKind::XJ1: return {-1.0, 1.0};
      default: return {1.0, 1.0};
    }
  }
  double d3(double shift_units) const {
    switch (kind_) {
      case XKind::XL1:
      case XKind::XJ1: return g() + shift_units + ell_ - 0.5;
      case XKind::XL2: return 1.0;
      default: return h() + shift_units + ell_ - 0.5;
    }
  }
  double fhat(int n) const {
    switch (kind_) {
      case XKind::XL1: return -2.0;
      case XKind::XL2:
      case XKind::XJ2: return 2.0 * (n + g() + 0.5);
      default: return -2.0 * (n + h() + 0.5);
    }
  }
  double bhat(int n) const {
    switch (kind_) {
      case XKind::XL1:
      case XKind::XJ1: return -2.0 * (n + g() + 2.0 * ell_ - 0.5);
      case XKind::XL2: return 2.0;
      default: return 2.0 * (n + h() + 2.0 * ell_ - 0.5);
    }
  }

  // the X polynomial as eta-coefficients
  Poly P_coeffs(int n) const {
    if (ell_ == 0) return oqm_poly_coeffs(base_, n);
    Poly xi = xi_coeffs(false), xi_up = xi_coeffs(true), pn = pn_coeffs(n);
    Poly t1 = poly_mul(poly_mul(d2(), xi), poly_derivative(pn));
    Poly t2 = poly_scale(poly_mul(xi_up, pn), d1(0.0));
    Poly r = poly_add(t1, poly_scale(t2, -1.0));
    return poly_scale(r, 2.0 * sign() / fhat(n));
  }

  // base family at lambda + ell delta (for the deformed prepotential)
  Family base_l() const { return base_.shifted(ell_); }
  double energy_l(int n) const { return base_l().energy(n); }

  double h_norm(int n) const {
    // h_{l,n} = (bhat_n / fhat_n) h_n(lambda + ell delta + delta-tilde)
    double gp, hp = 0.0;
    switch (kind_) {
      case XKind::XL1: gp = g() + ell_ - 1.0; break;
      case XKind::XL2: gp = g() + ell_ + 1.0; break;
      case XKind::XJ1:
        gp = g() + ell_ - 1.0;
        hp = h() + ell_ + 1.0;
        break;
      default:
        gp = g() + ell_ + 1.0;
        hp = h() + ell_ - 1.0;
        break;
    }
    double hn;
    if (is_l()) {
      hn = std::exp(log_gamma_real(n + gp + 0.5) - log_gamma_real(n + 1.0)) / 2.0;
    } else {
      hn = std::exp(log_gamma_real(n + gp + 0.5) + log_gamma_real(n + hp + 0.5) -
                    log_gamma_real(n + 1.0) - log_gamma_real(n + gp + hp)) /
           (2.0 * (2.0 * n + gp + hp));
    }
    return bhat(n) / fhat(n) * hn;
  }

  // weight psi_l(x)^2 = phi0(x; lambda + ell delta)^2 / xi(eta(x); lambda)^2
  double weight(double x) const {
    Poly xi = xi_coeffs(false);
    double xv = poly_eval(xi, base_.eta(x));
    return base_l().phi0_squared(x) / (xv * xv);
  }

  // minimum modulus over the orthogonality domain; negative when the sign flips
  double xi_min_on_domain() const {
    double mn = 1e300;
    for (bool sh : {false, true}) {
      Poly xi = xi_coeffs(sh);
      double ref = 0.0;
      for (int i = 0; i <= 400; ++i) {
        double e = is_l() ? 60.0 * i / 400.0 : -1.0 + 2.0 * i / 400.0;
        double v = poly_eval(xi, e);
        if (ref == 0.0 && v != 0.0) ref = v;
        if (v * ref < 0.0) return -1.0;
        mn = std::min(mn, std::abs(v));
      }
    }
    return mn;
  }

 private:
  DeformedOqm(XKind kind, const Family& base, int ell) : kind_(kind), base_(base), ell_(ell) {}
  XKind kind_;
  Family base_;
  int ell_;
};

// xi ladder identities and the second-order equation for xi (oQM)
inline XiIdentityReport xi_identities_oqm(const DeformedOqm& d) {
  XiIdentityReport rep;
  if (d.ell() == 0) return rep;
  Poly xi = d.xi_coeffs(false), xiu = d.xi_coeffs(true);
  Poly dxi = poly_derivative(xi), dxiu = poly_derivative(xiu);
  Poly d2p = d.d2(), c2d2 = d.c2_over_d2();
  bool isl = d.is_l();
  auto etas = chebyshev_points(24, isl ? 0.1 : -0.92, isl ? 9.0 : 0.92);
  const Family& b = d.base();
  for (double e : etas) {
    // d1(l+ld) xi(l) + d2 xi'(l) = d1(l) xi(l+d)
    double lhs1 = d.d1(double(d.ell())) * poly_eval(xi, e) + poly_eval(d2p, e) * poly_eval(dxi, e);
    double rhs1 = d.d1(0.0) * poly_eval(xiu, e);
    rep.forward = std::max(rep.forward,
                           std::abs(lhs1 - rhs1) / std::max({1.0, std::abs(lhs1), std::abs(rhs1)}));
    // d3(l,l) xi(l+d) + (c2/d2) xi'(l+d) = d3(l+ld,l) xi(l)
    double lhs2 = d.d3(0.0) * poly_eval(xiu, e) + poly_eval(c2d2, e) * poly_eval(dxiu, e);
    double rhs2 = d.d3(double(d.ell())) * poly_eval(xi, e);
    rep.backward = std::max(
        rep.backward, std::abs(lhs2 - rhs2) / std::max({1.0, std::abs(lhs2), std::abs(rhs2)}));
    // c2 xi'' + c1-twisted xi' = -(1/4) E-twisted xi
    double c2v = isl ? e : 1.0 - e * e;
    double gg = d.g(), hh = d.h();
    double c1t, et;
    switch (d.kind()) {
      case XKind::XL1:
        c1t = (gg + d.ell() - 1.0) + 0.5 + e;
        et = -4.0 * d.ell();
        break;
      case XKind::XL2:
        c1t = (-gg - d.ell()) + 0.5 - e;
        et = 4.0 * d.ell();
        break;
      case XKind::XJ1: {
        double tg = gg + d.ell() - 1.0, th = -hh - d.ell();
        c1t = th - tg - (tg + th + 1.0) * e;
        et = 4.0 * d.ell() * (d.ell() + gg - hh - 1.0);
        break;
      }
      default: {
        double tg = -gg - d.ell(), th = hh + d.ell() - 1.0;
        c1t = th - tg - (tg + th + 1.0) * e;
        et = 4.0 * d.ell() * (d.ell() - gg + hh - 1.0);
        break;
      }
    }
    Poly ddxi = poly_derivative(dxi);
    double lhs3 = c2v * poly_eval(ddxi, e) + c1t * poly_eval(dxi, e);
    double rhs3 = -0.25 * et * poly_eval(xi, e);
    rep.diffeq = std::max(rep.diffeq,
                          std::abs(lhs3 - rhs3) / std::max({1.0, std::abs(lhs3), std::abs(rhs3)}));
    (void)b;
  }
  return rep;
}

// second-order equations satisfied by the X polynomials themselves
inline double x_ode_residual_oqm(const DeformedOqm& d, int n) {
  Poly P = d.P_coeffs(n), dP = poly_derivative(P), ddP = poly_derivative(dP);
  Poly xi = d.xi_coeffs(false), dxi = poly_derivative(xi);
  Poly xiu = d.xi_coeffs(true), dxiu = poly_derivative(xiu);
  bool isl = d.is_l();
  double gg = d.g(), hh = d.h();
  int ell = d.ell();
  auto etas = chebyshev_points(20, isl ? 0.15 : -0.9, isl ? 8.0 : 0.9);
  double worst = 0.0;
  for (double e : etas) {
    double xv = poly_eval(xi, e), dxv = poly_eval(dxi, e), duv = poly_eval(dxiu, e);
    double pv = poly_eval(P, e), dpv = poly_eval(dP, e), ddpv = poly_eval(ddP, e);
    double lhs;
    switch (d.kind()) {
      case XKind::XL1:
        lhs = e * ddpv + (gg + ell + 0.5 - e - 2.0 * e * dxv / xv) * dpv +
              (2.0 * e * duv / xv + n - ell) * pv;
        break;
      case XKind::XL2:
        lhs = e * ddpv + (gg + ell + 0.5 - e - 2.0 * e * dxv / xv) * dpv +
              (-2.0 * (gg + 0.5) * duv / xv + n + ell) * pv;
        break;
      case XKind::XJ1:
        lhs = (1.0 - e * e) * ddpv +
              (hh - gg - (gg + hh + 2.0 * ell + 1.0) * e - 2.0 * (1.0 - e * e) * dxv / xv) * dpv +
              (-2.0 * (hh + 0.5) * (1.0 - e) * duv / xv + ell * (ell + gg - hh - 1.0) +
               n * (n + gg + hh + 2.0 * ell)) *
                  pv;
        break;
      default:
        lhs = (1.0 - e * e) * ddpv +
              (hh - gg - (gg + hh + 2.0 * ell + 1.0) * e - 2.0 * (1.0 - e * e) * dxv / xv) * dpv +
              (2.0 * (gg + 0.5) * (1.0 + e) * duv / xv + ell * (ell + hh - gg - 1.0) +
               n * (n + gg + hh + 2.0 * ell)) *
                  pv;
        break;
    }
    double sc = std::max({1.0, std::abs(e * ddpv), std::abs(pv) * (n + ell + 1.0) * (n + ell + 1.0)});
    worst = std::max(worst, std::abs(lhs) / sc);
  }
  return worst;
}

// F-hat / B-hat ladder actions and the energy split (oQM, coefficient picture)
inline IntertwinerReport intertwiner_check_oqm(const DeformedOqm& d, int n_max = 4) {
  IntertwinerReport rep;
  Poly xi = d.xi_coeffs(false), xiu = d.xi_coeffs(true);
  Poly d2p = d.d2(), c2d2 = d.c2_over_d2();
  bool isl = d.is_l();
  auto etas = chebyshev_points(18, isl ? 0.15 : -0.9, isl ? 7.0 : 0.9);
  double f0b0 = d.fhat(0) * d.bhat(0);
  for (int n = 0; n <= n_max; ++n) {
    Poly pn = d.pn_coeffs(n), dpn = poly_derivative(pn);
    Poly pln = d.P_coeffs(n), dpln = poly_derivative(pln);
    double w1 = 0.0, w2 = 0.0, w3 = 0.0, sc1 = 1.0, sc2 = 1.0, sc3 = 1.0;
    for (double e : etas) {
      // Fhat P_n = fhat_n P_{l,n}
      double lhs1 = 2.0 * d.sign() *
                    (poly_eval(d2p, e) * poly_eval(xi, e) * poly_eval(dpn, e) -
                     d.d1(0.0) * poly_eval(xiu, e) * poly_eval(pn, e));
      double rhs1 = d.fhat(n) * poly_eval(pln, e);
      sc1 = std::max({sc1, std::abs(rhs1)});
      w1 = std::max(w1, std::abs(lhs1 - rhs1));
      // Bhat P_{l,n} = bhat_n P_n
      double lhs2 = -2.0 * d.sign() *
                    (poly_eval(c2d2, e) * poly_eval(dpln, e) + d.d3(0.0) * poly_eval(pln, e)) /
                    poly_eval(xi, e);
      double rhs2 = d.bhat(n) * poly_eval(pn, e);
      sc2 = std::max({sc2, std::abs(rhs2)});
      w2 = std::max(w2, std::abs(lhs2 - rhs2));
    }
    // operator identity Bhat Fhat = H-tilde(l') + f0 b0 on P_n via coefficients
    Poly fhat_pn = poly_add(poly_mul(poly_mul(d2p, xi), dpn),
                            poly_scale(poly_mul(xiu, pn), -d.d1(0.0)));
    fhat_pn = poly_scale(fhat_pn, 2.0 * d.sign());
    Poly num = poly_add(poly_mul(c2d2, poly_derivative(fhat_pn)),
                        poly_scale(fhat_pn, d.d3(0.0)));
    num = poly_scale(num, -2.0 * d.sign());
    // num / xi must equal (E_n(lambda + ell delta) + f0b0) P_n, so compare
    // num with the product
    double en = d.energy_l(n) + f0b0;
    Poly tgt = poly_scale(poly_mul(xi, pn), en);
    for (double e : etas) {
      double a = poly_eval(num, e), b = poly_eval(tgt, e);
      sc3 = std::max({sc3, std::abs(b)});
      w3 = std::max(w3, std::abs(a - b));
    }
    rep.fhat_action = std::max(rep.fhat_action, w1 / sc1);
    rep.bhat_action = std::max(rep.bhat_action, w2 / sc2);
    rep.hplus = std::max(rep.hplus, w3 / sc3);
    double split = d.fhat(n) * d.bhat(n) - f0b0;
    rep.energy_split = std::max(rep.energy_split, std::abs(split - d.energy_l(n)) /
                                                      std::max(1.0, std::abs(d.energy_l(n))));
  }
  // shift intertwining with s-hat = 1: Fhat(l+d) F(l+ld+dt) = F_l(l) Fhat(l)
  DeformedOqm up = DeformedOqm::make(d.kind(), d.base().shifted(1), d.ell());
  for (int n = 1; n <= std::min(3, n_max); ++n) {
    Poly pn = d.pn_coeffs(n);
    // F(lambda + ell delta + delta-tilde) = cF d/deta at the shifted-tilde point
    Poly f_base = poly_scale(poly_derivative(pn), d.base().cF());
    Poly up_xi = up.xi_coeffs(false), up_xiu = up.xi_coeffs(true);
    Poly lhs = poly_add(poly_mul(poly_mul(up.d2(), up_xi), poly_derivative(f_base)),
                        poly_scale(poly_mul(up_xiu, f_base), -up.d1(0.0)));
    lhs = poly_scale(lhs, 2.0 * up.sign());
    // F_l(lambda) Fhat(lambda) P_n: Fhat P_n known; F_l = cF (xi_up/xi)(d/deta - (log xi_up)')
    Poly fhat_pn = poly_add(poly_mul(poly_mul(d.d2(), xi), poly_derivative(pn)),
                            poly_scale(poly_mul(xiu, pn), -d.d1(0.0)));
    fhat_pn = poly_scale(fhat_pn, 2.0 * d.sign());
    // rhs * xi = cF (xi_up d/deta(fhat_pn) - xi_up' fhat_pn)
    Poly rhs_num = poly_add(poly_mul(xiu, poly_derivative(fhat_pn)),
                            poly_scale(poly_mul(poly_derivative(xiu), fhat_pn), -1.0));
    rhs_num = poly_scale(rhs_num, d.base().cF());
    Poly lhs_xi = poly_mul(lhs, xi);
    double w = 0.0, sc = 1.0;
    for (double e : etas) {
      double a = poly_eval(lhs_xi, e), b = poly_eval(rhs_num, e);
      sc = std::max({sc, std::abs(a), std::abs(b)});
      w = std::max(w, std::abs(a - b));
    }
    rep.shift_intertwine = std::max(rep.shift_intertwine, w / sc);
  }
  return rep;
}

// deformed shape invariance (oQM), pointwise in x
inline double deformed_shape_invariance_oqm(const DeformedOqm& d, int samples = 20) {
  DeformedOqm up = DeformedOqm::make(d.kind(), d.base().shifted(1), d.ell());
  Family bl = d.base_l();          // lambda + ell delta
  Family blu = bl.shifted(1);      // lambda + delta + ell delta
  Poly xi = d.xi_coeffs(false), xiu = d.xi_coeffs(true);
  Poly uxi = up.xi_coeffs(false), uxiu = up.xi_coeffs(true);
  auto [xlo, xhi] = sample_window(d.base());
  double worst = 0.0;
  auto wl_derivs = [&](const Family& fl, const Poly& xa, const Poly& xb, double x, double* w1,
                       double* w2) {
    // w_l = w(x; lambda + ell delta) + log xb(eta) - log xa(eta)
    double e = d.base().eta(x);
    double ep = d.is_l() ? 2.0 * x : -2.0 * std::sin(2.0 * x);
    double epp = d.is_l() ? 2.0 : -4.0 * std::cos(2.0 * x);
    auto lg = [&](const Poly& p, double* l1, double* l2) {
      double v = poly_eval(p, e), dv = poly_eval(poly_derivative(p), e),
             ddv = poly_eval(poly_derivative(poly_derivative(p)), e);
      *l1 = dv / v;
      *l2 = ddv / v - dv * dv / (v * v);
    };
    double a1, a2, b1, b2;
    lg(xa, &a1, &a2);
    lg(xb, &b1, &b2);
    *w1 = fl.dw(x) + ep * (b1 - a1);
    *w2 = fl.d2w(x) + epp * (b1 - a1) + ep * ep * (b2 - a2);
  };
  for (int k = 0; k < samples; ++k) {
    double x = xlo + (xhi - xlo) * (k + 0.5) / samples;
    double l1, l2, u1, u2;
    wl_derivs(bl, xi, xiu, x, &l1, &l2);
    wl_derivs(blu, uxi, uxiu, x, &u1, &u2);
    double lhs = l1 * l1 - l2;
    double rhs = u1 * u1 + u2 + d.energy_l(1);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
  return worst;
}

// quadrature orthogonality of the X_l polynomials against closed-form norms
inline double deformed_orthogonality_oqm(const DeformedOqm& d, int n_max = 4) {
  IntegrationDomain dom = family_domain(d.base());
  std::vector<Poly> ps(n_max + 1);
  std::vector<double> hn(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    ps[n] = d.P_coeffs(n);
    hn[n] = d.h_norm(n);
  }
  double worst = 0.0;
  for (int n = 0; n <= n_max; ++n)
    for (int m = n; m <= n_max; ++m) {
      double v = integrate(
          [&](double x) {
            double e = d.base().eta(x);
            return d.weight(x) * poly_eval(ps[n], e) * poly_eval(ps[m], e);
          },
          dom, 1e-12, 1e-12);
      double g = v / std::sqrt(hn[n] * hn[m]);
      worst = std::max(worst, std::abs(g - (n == m ? 1.0 : 0.0)));
    }
  return worst;
}

// mirror identity between the two XJ constructions
inline double xj_mirror_residual(double g, double h, int ell, int n) {
  ParameterVector pv1, pv2;
  pv1.values["g"] = g;
  pv1.values["h"] = h;
  pv2.values["g"] = h;
  pv2.values["h"] = g;
  DeformedOqm d2 = DeformedOqm::make(XKind::XJ2, Family::make(FamilyId::J, pv1), ell);
  DeformedOqm d1 = DeformedOqm::make(XKind::XJ1, Family::make(FamilyId::J, pv2), ell);
  Poly p2 = d2.P_coeffs(n), p1 = d1.P_coeffs(n);
  double sgn = ((ell + n) % 2) ? -1.0 : 1.0;
  double worst = 0.0, scale = 1.0;
  for (double e : chebyshev_points(16, -0.95, 0.95)) {
    double a = poly_eval(p2, e);
    double b = sgn * poly_eval(p1, -e);
    scale = std::max({scale, std::abs(a), std::abs(b)});
    worst = std::max(worst, std::abs(a - b));
  }
  return worst / scale;
}

// sign changes on the physical interval + total degree
inline ZeroDegreeReport zero_degree_check_oqm(const DeformedOqm& d, int n) {
  ZeroDegreeReport rep;
  Poly p = d.P_coeffs(n);
  double lo = d.is_l() ? 1e-6 : -1.0 + 1e-9, hi = d.is_l() ? 80.0 + 20.0 * (n + d.ell()) : 1.0 - 1e-9;
  int grid = 4000;
  double prev = poly_eval(p, lo);
  for (int i = 1; i <= grid; ++i) {
    double e = lo + (hi - lo) * i / grid;
    double cur = poly_eval(p, e);
    if (prev * cur < 0.0) ++rep.sign_changes;
    if (cur != 0.0) prev = cur;
  }
  double cscale = 0.0;
  for (double v : p) cscale = std::max(cscale, std::abs(v));
  int deg = int(p.size()) - 1;
  while (deg > 0 && std::abs(p[deg]) < 1e-11 * cscale) --deg;
  rep.degree_ok = (deg == d.ell() + n);
  return rep;
}

inline double no_three_term_residual_oqm(const DeformedOqm& d) {
  IntegrationDomain dom = family_domain(d.base());
  Poly p0 = d.P_coeffs(0), p1 = d.P_coeffs(1), p2 = d.P_coeffs(2);
  auto ip = [&](const std::function<double(double)>& f, const std::function<double(double)>& g) {
    return integrate([&](double x) { return d.weight(x) * f(x) * g(x); }, dom, 1e-11, 1e-11);
  };
  auto e0 = [&](double x) { return poly_eval(p0, d.base().eta(x)); };
  auto e1 = [&](double x) { return poly_eval(p1, d.base().eta(x)); };
  auto e2 = [&](double x) { return poly_eval(p2, d.base().eta(x)); };
  auto ep1 = [&](double x) { return d.base().eta(x) * poly_eval(p1, d.base().eta(x)); };
  // project eta P1 onto span{P0, P1, P2} in the weighted inner product
  DMat gram(3, 3);
  std::function<double(double)> fs[3] = {e0, e1, e2};
  std::vector<double> rhs(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      gram(i, j) = ip(fs[i], fs[j]);
      gram(j, i) = gram(i, j);
    }
    rhs[i] = ip(fs[i], ep1);
  }
  double full = ip(ep1, ep1);
  std::vector<double> c = solve_dense(gram, rhs);
  double proj = c[0] * rhs[0] + c[1] * rhs[1] + c[2] * rhs[2];
  double rem = std::max(0.0, full - proj);
  return std::sqrt(rem / std::max(full, 1e-300));
}

}  // namespace dqm
// ---------------------------------------------------------------------------
// idQM deformations: XMP, XW, XAW (pointwise-identity scope)
// ---------------------------------------------------------------------------

namespace dqm {

class DeformedIdqm {
 public:
  static DeformedIdqm make(XKind kind, const Family& base, int ell) {
    if (kind != XKind::XMP && kind != XKind::XW && kind != XKind::XAW)
      throw parameter_error("DeformedIdqm needs an idQM deformation kind");
    if (xkind_base(kind) != base.id()) throw parameter_error("base family does not match the kind");
    if (kind == XKind::XMP && (ell % 2)) throw parameter_error("XMP needs even ell");
    if (kind == XKind::XW) {
      double a1 = base.par("a1"), a2 = base.par("a2"), a3 = base.par("a3"), a4 = base.par("a4");
      if (!(a1 < a3 && a1 < a4 && a2 < a3 && a2 < a4))
        throw parameter_error("XW needs a_{1,2} < a_{3,4}");
    }
    if (kind == XKind::XAW) {
      double a1 = base.par("a1"), a2 = base.par("a2"), a3 = base.par("a3"), a4 = base.par("a4");
      if (!(a1 > a3 && a1 > a4 && a2 > a3 && a2 > a4))
        throw parameter_error("XAW needs a_{1,2} > |a_{3,4}|");
    }
    return DeformedIdqm(kind, base, ell);
  }

  XKind kind() const { return kind_; }
  const Family& base() const { return base_; }
  int ell() const { return ell_; }
  double gamma() const { return base_.gamma(); }
  const Family& base_l() const { return base_l_; }
  const Family& base_lt() const { return base_lt_; }
  double energy_l(int n) const { return base_l_.energy(n); }

  // deforming polynomial at coordinate x (eta handled inside the kernels)
  cplx xi(cplx x, bool shifted) const {
    const Family& f = shifted ? base_up_ : base_;
    double s = 0.5 * (ell_ - 1);
    switch (kind_) {
      case XKind::XMP:
        return kernels::meixner_pollaczek(ell_, -(f.par("a") + s), x);
      case XKind::XW:
        return kernels::wilson(ell_,
                               {-(f.par("a1") + s), -(f.par("a2") + s), f.par("a3") + s,
                                f.par("a4") + s},
                               x);
      default: {
        double qs = std::pow(f.q(), s);
        return kernels::askey_wilson(
            ell_, {1.0 / (f.par("a1") * qs), 1.0 / (f.par("a2") * qs), f.par("a3") * qs,
                   f.par("a4") * qs},
            f.q(), std::exp(cplx(0.0, 1.0) * x));
      }
    }
  }

  // potential-function factors at a given parameter point
  cplx v1(const Family& f, cplx x) const {
    const cplx I(0.0, 1.0);
    switch (kind_) {
      case XKind::XMP: return I * (f.par("a") + I * x);
      case XKind::XW: return (f.par("a1") + I * x) * (f.par("a2") + I * x);
      default: {
        cplx z = std::exp(I * x);
        return (1.0 - f.par("a1") * z) * (1.0 - f.par("a2") * z) / z;
      }
    }
  }
  cplx v1s(const Family& f, cplx x) const {
    const cplx I(0.0, 1.0);
    switch (kind_) {
      case XKind::XMP: return -I * (f.par("a") - I * x);
      case XKind::XW: return (f.par("a1") - I * x) * (f.par("a2") - I * x);
      default: {
        cplx z = std::exp(-I * x);
        return (1.0 - f.par("a1") * z) * (1.0 - f.par("a2") * z) / z;
      }
    }
  }
  cplx v2(const Family& f, cplx x) const {
    const cplx I(0.0, 1.0);
    switch (kind_) {
      case XKind::XMP: return I;
      case XKind::XW: return (f.par("a3") + I * x) * (f.par("a4") + I * x);
      default: {
        cplx z = std::exp(I * x);
        return (1.0 - f.par("a3") * z) * (1.0 - f.par("a4") * z) / z;
      }
    }
  }
  cplx v2s(const Family& f, cplx x) const {
    const cplx I(0.0, 1.0);
    switch (kind_) {
      case XKind::XMP: return -I;
      case XKind::XW: return (f.par("a3") - I * x) * (f.par("a4") - I * x);
      default: {
        cplx z = std::exp(-I * x);
        return (1.0 - f.par("a3") * z) * (1.0 - f.par("a4") * z) / z;
      }
    }
  }

  double fhat(int n) const {
    switch (kind_) {
      case XKind::XMP: return 2.0 * base_.par("a") + n;
      case XKind::XW: return base_.par("a1") + base_.par("a2") + n;
      default:
        return -std::pow(base_.q(), -0.5 * (n - ell_)) *
               (1.0 - base_.par("a1") * base_.par("a2") * std::pow(base_.q(), n));
    }
  }
  double bhat(int n) const {
    switch (kind_) {
      case XKind::XMP: return 2.0;
      case XKind::XW: return base_.par("a3") + base_.par("a4") + n + 2.0 * ell_ - 1.0;
      default:
        return -std::pow(base_.q(), -0.5 * (n + ell_)) *
               (1.0 - base_.par("a3") * base_.par("a4") * std::pow(base_.q(), n + 2.0 * ell_ - 1.0));
    }
  }

  // X polynomial via the bilinear formula; complex-capable
  cplx P(int n, cplx x) const {
    if (ell_ == 0) return base_.P(n, x);
    const cplx I(0.0, 1.0);
    double g2 = 0.5 * gamma();
    cplx xm = x - I * g2, xp = x + I * g2;
    cplx num = v1(base_l_, x) * xi(xp, false) * base_lt_.P(n, xm) -
               v1s(base_l_, x) * xi(xm, false) * base_lt_.P(n, xp);
    return -I * num / (fhat(n) * varphi_c(base_, x));
  }

  // twisted potential V(x; t(lambda + (ell-1) delta)) and its *-partner
  cplx V_twist(cplx x) const {
    const cplx I(0.0, 1.0);
    double s = 0.5 * (ell_ - 1);
    switch (kind_) {
      case XKind::XMP: return -(base_.par("a") + s) + I * x;
      case XKind::XW: {
        cplx ix = I * x;
        return (-(base_.par("a1") + s) + ix) * (-(base_.par("a2") + s) + ix) *
               (base_.par("a3") + s + ix) * (base_.par("a4") + s + ix) /
               ((2.0 * ix) * (2.0 * ix + 1.0));
      }
      default: {
        double q = base_.q();
        double qs = std::pow(q, s);
        cplx z = std::exp(I * x);
        return (1.0 - z / (base_.par("a1") * qs)) * (1.0 - z / (base_.par("a2") * qs)) *
               (1.0 - base_.par("a3") * qs * z) * (1.0 - base_.par("a4") * qs * z) /
               ((1.0 - z * z) * (1.0 - q * z * z));
      }
    }
  }
  cplx V_twist_s(cplx x) const { return std::conj(V_twist(std::conj(x))); }

  double energy_twist() const {
    switch (kind_) {
      case XKind::XMP: return 2.0 * ell_;
      case XKind::XW: {
        double b1t = -base_.par("a1") - base_.par("a2") + base_.par("a3") + base_.par("a4");
        return double(ell_) * (ell_ + b1t - 1.0);
      }
      default: {
        double q = base_.q();
        double b4t = base_.par("a3") * base_.par("a4") / (base_.par("a1") * base_.par("a2"));
        return (std::pow(q, -ell_) - 1.0) * (1.0 - b4t * std::pow(q, ell_ - 1));
      }
    }
  }

  // deformed potential V_l(x; lambda)
  cplx V_l(cplx x) const {
    const cplx I(0.0, 1.0);
    double g = gamma();
    return base_l_.V(x) * (xi(x + I * 0.5 * g, false) / xi(x - I * 0.5 * g, false)) *
           (xi(x - I * g, true) / xi(x, true));
  }
  cplx V_l_s(cplx x) const {
    const cplx I(0.0, 1.0);
    double g = gamma();
    return base_l_.Vstar(x) * (xi(x - I * 0.5 * g, false) / xi(x + I * 0.5 * g, false)) *
           (xi(x + I * g, true) / xi(x, true));
  }

  double h_norm(int n) const { return bhat(n) / fhat(n) * base_lt_.norm_constant(n); }

  // orthogonality weight (XMP case; positive on the line)
  double weight(double x) const {
    const cplx I(0.0, 1.0);
    double g2 = 0.5 * gamma();
    cplx prod = xi(cplx(x, 0.0) + I * g2, false) * xi(cplx(x, 0.0) - I * g2, false);
    return base_l_.phi0_squared(x) / prod.real();
  }

  double xi_min_on_rectangle(int nx = 60, int ny = 9) const {
    auto [xlo, xhi] = sample_window(base_);
    double g = std::abs(gamma());
    double mn = 1e300;
    for (int i = 0; i <= nx; ++i)
      for (int j = -ny; j <= ny; ++j) {
        cplx x(xlo + (xhi - xlo) * i / nx, g * j / ny);
        mn = std::min(mn, std::abs(xi(x, false)));
        mn = std::min(mn, std::abs(xi(x, true)));
      }
    return mn;
  }

 private:
  DeformedIdqm(XKind kind, const Family& base, int ell)
      : kind_(kind),
        base_(base),
        base_up_(base.shifted(1)),
        base_l_(base.shifted(ell)),
        base_lt_(make_base_lt(kind, base, ell)),
        ell_(ell) {}

  static Family make_base_lt(XKind kind, const Family& base, int ell) {
    ParameterVector pv = base.params();
    switch (kind) {
      case XKind::XMP:
        pv.values["a"] += 0.5 * (ell + 1);
        return Family::make(FamilyId::MP, pv);
      case XKind::XW:
        pv.values["a1"] += 0.5 * (ell + 1);
        pv.values["a2"] += 0.5 * (ell + 1);
        pv.values["a3"] += 0.5 * (ell - 1);
        pv.values["a4"] += 0.5 * (ell - 1);
        return Family::make(FamilyId::W, pv);
      default: {
        double q = base.q();
        pv.values["a1"] *= std::pow(q, 0.5 * (ell + 1));
        pv.values["a2"] *= std::pow(q, 0.5 * (ell + 1));
        pv.values["a3"] *= std::pow(q, 0.5 * (ell - 1));
        pv.values["a4"] *= std::pow(q, 0.5 * (ell - 1));
        return Family::make(FamilyId::AW, pv);
      }
    }
  }

  XKind kind_;
  Family base_, base_up_, base_l_, base_lt_;
  int ell_;
};

// a validated base-family draw arranged for the deformation's restrictions
// (XAW twists the pair a_{1,2}, which must dominate |a_{3,4}|)
inline Family draw_x_base(XKind kind, int N, Rng& rng) {
  ParameterVector pv = draw_params(xkind_base(kind), N, rng);
  if (kind == XKind::XAW) {
    std::array<double, 4> a = {pv.values["a1"], pv.values["a2"], pv.values["a3"], pv.values["a4"]};
    std::sort(a.begin(), a.end());
    pv.values["a1"] = a[3];
    pv.values["a2"] = a[2];
    pv.values["a3"] = a[1];
    pv.values["a4"] = a[0];
  }
  return Family::make(xkind_base(kind), pv);
}

// complex-shifted sample points across the analyticity strip
inline std::vector<cplx> idqm_sample_points(const Family& base, int count, uint64_t seed) {
  auto [xlo, xhi] = sample_window(base);
  double g = std::abs(base.gamma());
  uint64_t state = seed;
  auto uni = [&]() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return double(state >> 11) * 0x1.0p-53;
  };
  std::vector<cplx> pts(count);
  for (int i = 0; i < count; ++i)
    pts[i] = cplx(xlo + (xhi - xlo) * uni(), 0.9 * g * (uni() - 0.5));
  return pts;
}

inline XiIdentityReport xi_identities_idqm(const DeformedIdqm& d, int samples = 100,
                                           uint64_t seed = 17) {
  XiIdentityReport rep;
  if (d.ell() == 0) return rep;
  const cplx I(0.0, 1.0);
  double g = d.gamma(), g2 = 0.5 * g;
  Family lam_l = d.base_l();
  Family lam_lm1 = d.ell() >= 1 ? d.base().shifted(d.ell() - 1) : d.base();
  for (cplx x : idqm_sample_points(d.base(), samples, seed)) {
    cplx ph = varphi_c(d.base(), x);
    // forward: (i/phi)(v1*(l+ld) e^{g p/2} - v1(l+ld) e^{-g p/2}) xi(l) = fhat0 xi(l+d)
    cplx lhs1 = I / ph *
                (d.v1s(lam_l, x) * d.xi(x - I * g2, false) - d.v1(lam_l, x) * d.xi(x + I * g2, false));
    cplx rhs1 = d.fhat(0) * d.xi(x, true);
    rep.forward = std::max(rep.forward,
                           std::abs(lhs1 - rhs1) / std::max({1.0, std::abs(lhs1), std::abs(rhs1)}));
    // backward: (-i/phi)(v2(l+(l-1)d) e^{g p/2} - v2*(l+(l-1)d) e^{-g p/2}) xi(l+d) = bhat0 xi(l)
    cplx lhs2 = -I / ph *
                (d.v2(lam_lm1, x) * d.xi(x - I * g2, true) - d.v2s(lam_lm1, x) * d.xi(x + I * g2, true));
    cplx rhs2 = d.bhat(0) * d.xi(x, false);
    rep.backward = std::max(
        rep.backward, std::abs(lhs2 - rhs2) / std::max({1.0, std::abs(lhs2), std::abs(rhs2)}));
    // difference equation with the twisted potential
    cplx lhs3 = d.V_twist(x) * (d.xi(x - I * g, false) - d.xi(x, false)) +
                d.V_twist_s(x) * (d.xi(x + I * g, false) - d.xi(x, false));
    cplx rhs3 = d.energy_twist() * d.xi(x, false);
    rep.diffeq = std::max(rep.diffeq,
                          std::abs(lhs3 - rhs3) / std::max({1.0, std::abs(lhs3), std::abs(rhs3)}));
  }
  return rep;
}

// base-family difference equation at complex points (the bispectral check)
inline double base_diffeq_residual_idqm(const Family& fam, int n_max, int samples = 40,
                                        uint64_t seed = 29) {
  const cplx I(0.0, 1.0);
  double g = fam.gamma();
  double worst = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    for (cplx x : idqm_sample_points(fam, samples, seed)) {
      cplx lhs = fam.V(x) * (fam.P(n, x - I * g) - fam.P(n, x)) +
                 fam.Vstar(x) * (fam.P(n, x + I * g) - fam.P(n, x));
      cplx rhs = fam.energy(n) * fam.P(n, x);
      worst =
          std::max(worst, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
  }
  return worst;
}

// Fhat/Bhat ladder, the factorized polynomial Hamiltonians, and the energy
// split, pointwise
inline IntertwinerReport intertwiner_check_idqm(const DeformedIdqm& d, int n_max = 4,
                                                int samples = 24, uint64_t seed = 31) {
  IntertwinerReport rep;
  const cplx I(0.0, 1.0);
  double g = d.gamma(), g2 = 0.5 * g;
  const Family& blt = d.base_lt();
  Family lam_lm1 = d.ell() >= 1 ? d.base().shifted(d.ell() - 1) : d.base();
  double f0b0 = d.fhat(0) * d.bhat(0);
  auto pts = idqm_sample_points(d.base(), samples, seed);
  for (int n = 0; n <= n_max; ++n) {
    // Bhat P_{l,n} as a function of (complex) x
    auto bhat_pln = [&](cplx x) {
      return -I / (d.xi(x, false) * varphi_c(d.base(), x)) *
             (d.v2(lam_lm1, x) * d.P(n, x - I * g2) - d.v2s(lam_lm1, x) * d.P(n, x + I * g2));
    };
    // Fhat applied to a function h
    auto fhat_of = [&](const std::function<cplx(cplx)>& h, cplx x) {
      return -I / varphi_c(d.base(), x) *
             (d.v1(d.base_l(), x) * d.xi(x + I * g2, false) * h(x - I * g2) -
              d.v1s(d.base_l(), x) * d.xi(x - I * g2, false) * h(x + I * g2));
    };
    for (cplx x : pts) {
      // Fhat P_n = fhat_n P_{l,n} holds by construction; check Bhat P_{l,n} = bhat_n P_n
      cplx lhs = bhat_pln(x);
      cplx rhs = d.bhat(n) * blt.P(n, x);
      rep.bhat_action = std::max(
          rep.bhat_action, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
      // Bhat Fhat P_n = (E_n(l+ld+dt) + f0 b0) P_n
      auto pn_fn = [&](cplx z) { return blt.P(n, z); };
      cplx bf = -I / (d.xi(x, false) * varphi_c(d.base(), x)) *
                (d.v2(lam_lm1, x) * fhat_of(pn_fn, x - I * g2) -
                 d.v2s(lam_lm1, x) * fhat_of(pn_fn, x + I * g2));
      cplx bf_rhs = (blt.energy(n) + f0b0) * blt.P(n, x);
      rep.hplus = std::max(rep.hplus,
                           std::abs(bf - bf_rhs) / std::max({1.0, std::abs(bf), std::abs(bf_rhs)}));
      // Fhat Bhat P_{l,n} = (E_{l,n} + f0 b0) P_{l,n}
      cplx fb = fhat_of(bhat_pln, x);
      cplx fb_rhs = (d.energy_l(n) + f0b0) * d.P(n, x);
      rep.hminus = std::max(rep.hminus,
                            std::abs(fb - fb_rhs) / std::max({1.0, std::abs(fb), std::abs(fb_rhs)}));
    }
    double split = d.fhat(n) * d.bhat(n) - f0b0;
    rep.energy_split = std::max(rep.energy_split, std::abs(split - d.energy_l(n)) /
                                                      std::max(1.0, std::abs(d.energy_l(n))));
  }
  return rep;
}

// deformed shape invariance (idQM), pointwise at complex samples
inline ShapeInvarianceResidual deformed_shape_invariance_idqm(const DeformedIdqm& d,
                                                              int samples = 24,
                                                              uint64_t seed = 37) {
  DeformedIdqm up = DeformedIdqm::make(d.kind(), d.base().shifted(1), d.ell());
  const cplx I(0.0, 1.0);
  double g = d.gamma(), g2 = 0.5 * g;
  double kp = d.base().kappa();
  ShapeInvarianceResidual r;
  for (cplx x : idqm_sample_points(d.base(), samples, seed)) {
    cplx l1 = d.V_l(x - I * g2) * d.V_l_s(x - I * g2);
    cplx r1 = kp * kp * up.V_l(x) * up.V_l_s(x - I * g);
    r.multiplicative =
        std::max(r.multiplicative, std::abs(l1 - r1) / std::max({1.0, std::abs(l1), std::abs(r1)}));
    cplx l2 = d.V_l(x + I * g2) + d.V_l_s(x - I * g2);
    cplx r2 = kp * (up.V_l(x) + up.V_l_s(x)) - d.energy_l(1);
    r.additive = std::max(r.additive, std::abs(l2 - r2) / std::max({1.0, std::abs(l2), std::abs(r2)}));
  }
  return r;
}

// XMP orthogonality by real-line quadrature (best effort)
inline double deformed_orthogonality_xmp(const DeformedIdqm& d, int n_max = 3) {
  if (d.kind() != XKind::XMP) throw parameter_error("quadrature orthogonality implemented for XMP");
  IntegrationDomain dom = family_domain(d.base());
  double worst = 0.0;
  for (int n = 0; n <= n_max; ++n)
    for (int m = n; m <= n_max; ++m) {
      double v = integrate(
          [&](double x) {
            return d.weight(x) * d.P(n, cplx(x, 0.0)).real() * d.P(m, cplx(x, 0.0)).real();
          },
          dom, 1e-11, 1e-11);
      double g = v / std::sqrt(d.h_norm(n) * d.h_norm(m));
      worst = std::max(worst, std::abs(g - (n == m ? 1.0 : 0.0)));
    }
  return worst;
}

// linear-independence witness in the physical norm: project sqrt(w) eta P_1
// onto the span of sqrt(w) {P_0, P_1, P_2} on a dense grid
inline double no_three_term_residual_idqm(const DeformedIdqm& d) {
  double xlo, xhi;
  switch (d.base().id()) {
    case FamilyId::MP: xlo = -14.0; xhi = 14.0; break;
    case FamilyId::W: xlo = 1e-3; xhi = 30.0; break;
    default: xlo = 1e-3; xhi = 3.14159265358979 - 1e-3; break;
  }
  int pts = 400;
  DMat m(pts, 3);
  std::vector<double> rhs(pts);
  double nrm = 0.0;
  for (int i = 0; i < pts; ++i) {
    double x = xlo + (xhi - xlo) * (i + 0.5) / pts;
    double sw = std::sqrt(std::max(0.0, d.weight(x)));
    m(i, 0) = sw * d.P(2, cplx(x, 0.0)).real();
    m(i, 1) = sw * d.P(1, cplx(x, 0.0)).real();
    m(i, 2) = sw * d.P(0, cplx(x, 0.0)).real();
    rhs[i] = d.base_l().eta(x) * m(i, 1);
    nrm += rhs[i] * rhs[i];
  }
  double res;
  solve_least_squares(m, rhs, &res);
  return res / std::sqrt(std::max(nrm, 1e-300));
}

}  // namespace dqm
