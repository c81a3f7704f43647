#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "dqm/family.hpp"
#include "dqm/lattice.hpp"
#include "dqm/linalg.hpp"
#include "dqm/polynomial.hpp"

namespace dqm {

// Dense realizations of H, H-tilde, A, A-dagger and eta on the (possibly
// truncated) lattice, plus the spectral decomposition used for matrix
// functions of H.
struct OperatorSet {
  int dim = 0;
  DMat H, Htilde, A, Adag, eta;
  std::vector<double> eta_diag;
  SpectralDecomposition spec;
  int interior = 0;  // entries with both indices below this are exact
};

inline OperatorSet build_operators(const Family& fam) {
  JacobiMatrix jm = build_hamiltonian(fam);
  OperatorSet os;
  os.dim = jm.dim;
  os.H = DMat(jm.dim, jm.dim);
  os.Htilde = DMat(jm.dim, jm.dim);
  os.A = DMat(jm.dim, jm.dim);
  os.Adag = DMat(jm.dim, jm.dim);
  os.eta = DMat(jm.dim, jm.dim);
  os.eta_diag.resize(jm.dim);
  for (int x = 0; x < jm.dim; ++x) {
    double bx = fam.B(double(x)), dx = fam.D(double(x));
    if (fam.finite() && x == jm.dim - 1) bx = 0.0;
    os.H(x, x) = bx + dx;
    os.Htilde(x, x) = bx + dx;
    if (x + 1 < jm.dim) {
      os.H(x, x + 1) = jm.off[x];
      os.H(x + 1, x) = jm.off[x];
      os.Htilde(x, x + 1) = -bx;
      os.Htilde(x + 1, x) = -fam.D(double(x + 1));
    }
    os.A(x, x) = std::sqrt(bx);
    os.Adag(x, x) = std::sqrt(bx);
    if (x + 1 < jm.dim) {
      double sd = std::sqrt(fam.D(double(x + 1)));
      os.A(x, x + 1) = -sd;
      os.Adag(x + 1, x) = -sd;
    }
    os.eta_diag[x] = fam.eta(double(x));
    os.eta(x, x) = os.eta_diag[x];
  }
  os.spec = eigendecompose(jm);
  os.interior = fam.finite() ? jm.dim : jm.dim - 7;
  return os;
}

namespace detail {

inline double max_abs_block(const DMat& m, int limit) {
  double r = 0.0;
  for (int i = 0; i < limit; ++i)
    for (int j = 0; j < limit; ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

}  // namespace detail

// f(H) through the spectral decomposition
inline DMat matrix_function(const OperatorSet& os, const std::function<double(double)>& f) {
  int n = os.dim;
  DMat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += os.spec.eigenvectors(i, k) * f(os.spec.eigenvalues[k]) * os.spec.eigenvectors(j, k);
      r(i, j) = s;
    }
  return r;
}

inline ZMat matrix_function_c(const OperatorSet& os, const std::function<cplx(double)>& f) {
  int n = os.dim;
  ZMat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k)
        s += os.spec.eigenvectors(i, k) * f(os.spec.eigenvalues[k]) * os.spec.eigenvectors(j, k);
      r(i, j) = s;
    }
  return r;
}

// ||H - Adag A||_max (definitional, should vanish to rounding)
inline double factorized_assembly_residual(const OperatorSet& os) {
  DMat d = os.Adag * os.A - os.H;
  return max_abs(d) / std::max(1.0, max_abs(os.H));
}

// [H,[H,eta]] = eta R0(H) + [H,eta] R1(H) + R-1(H), max-entry residual on the
// exact block, normalized by ||H||^2
inline double closure_residual(const Family& fam, const OperatorSet& os) {
  ClosureData cd = fam.closure();
  DMat heta = commutator(os.H, os.eta);
  DMat lhs = commutator(os.H, heta);
  DMat r0h = matrix_function(os, [&](double y) { return cd.R0(y); });
  DMat r1h = matrix_function(os, [&](double y) { return cd.R1(y); });
  DMat rm1h = matrix_function(os, [&](double y) { return cd.Rm1(y); });
  DMat rhs = os.eta * r0h + heta * r1h + rm1h;
  double h = max_abs(os.H);
  return detail::max_abs_block(lhs - rhs, os.interior) / (h * h);
}

// dual closure with the coefficient functions built pointwise from the
// shifted sinusoidal coordinate (beta = i: shifts are x -> x -+ 1)
inline double dual_closure_residual(const Family& fam, const OperatorSet& os) {
  int n = os.dim;
  DMat r1d(n, n), r0d(n, n), rm1d(n, n);
  for (int x = 0; x < n; ++x) {
    double e0 = fam.eta(double(x));
    double ep = fam.eta(double(x + 1));  // eta(x - i beta)
    double em = fam.eta(double(x - 1));  // eta(x + i beta)
    r1d(x, x) = (ep - e0) + (em - e0);
    r0d(x, x) = -(ep - e0) * (em - e0);
    double bx = fam.B(double(x)), dx = fam.D(double(x));
    if (fam.finite() && x == n - 1) bx = 0.0;
    rm1d(x, x) = -(bx + dx) * r0d(x, x);  // epsilon (V+ + V-) R0-dual
  }
  DMat etah = commutator(os.eta, os.H);
  DMat lhs = commutator(os.eta, etah);
  DMat rhs = os.H * r0d + etah * r1d + rm1d;
  double scale = std::max(1.0, max_abs(lhs));
  return detail::max_abs_block(lhs - rhs, os.interior) / scale;
}

// pointwise shape-invariance conditions on the lattice
struct ShapeInvarianceResidual {
  double multiplicative = 0.0;  // B(x+1;l) D(x+1;l) = kappa^2 B(x;l+d) D(x+1;l+d)
  double additive = 0.0;        // B(x;l) + D(x+1;l) = kappa(B+D)(x;l+d) + E(1;l)
};

inline ShapeInvarianceResidual shape_invariance_residual(const Family& fam, int x_max = -1) {
  Family up = fam.shifted(1);
  double kp = fam.kappa();
  if (x_max < 0) x_max = fam.finite() ? fam.N() - 1 : 24;
  ShapeInvarianceResidual r;
  for (int x = 0; x <= x_max; ++x) {
    double l1 = fam.B(double(x + 1)) * fam.D(double(x + 1));
    double r1 = kp * kp * up.B(double(x)) * up.D(double(x + 1));
    r.multiplicative =
        std::max(r.multiplicative, std::abs(l1 - r1) / std::max({1.0, std::abs(l1), std::abs(r1)}));
    double l2 = fam.B(double(x)) + fam.D(double(x + 1));
    double r2 = kp * (up.B(double(x)) + up.D(double(x))) + fam.energy(1);
    r.additive = std::max(r.additive, std::abs(l2 - r2) / std::max({1.0, std::abs(l2), std::abs(r2)}));
  }
  return r;
}

// idQM shape invariance, pointwise at complex sample points
inline ShapeInvarianceResidual shape_invariance_residual_idqm(const Family& fam, int samples = 24) {
  Family up = fam.shifted(1);
  double kp = fam.kappa();
  double g = fam.gamma();
  ShapeInvarianceResidual r;
  auto [xlo, xhi] = sample_window(fam);
  for (int k = 0; k < samples; ++k) {
    double x = xlo + (xhi - xlo) * (k + 0.5) / samples;
    cplx xm = cplx(x, -0.5 * g);
    cplx l1 = fam.V(xm) * fam.Vstar(xm);
    cplx r1 = kp * kp * up.V(cplx(x, 0.0)) * up.Vstar(cplx(x, -g));
    r.multiplicative =
        std::max(r.multiplicative, std::abs(l1 - r1) / std::max({1.0, std::abs(l1), std::abs(r1)}));
    cplx l2 = fam.V(cplx(x, 0.5 * g)) + fam.Vstar(cplx(x, -0.5 * g));
    cplx r2 = kp * (up.V(cplx(x, 0.0)) + up.Vstar(cplx(x, 0.0))) - fam.energy(1);
    r.additive = std::max(r.additive, std::abs(l2 - r2) / std::max({1.0, std::abs(l2), std::abs(r2)}));
  }
  return r;
}

// oQM shape invariance: (dw)^2 - d2w at lambda = (dw)^2 + d2w at lambda+delta + E(1)
inline double shape_invariance_residual_oqm(const Family& fam, int samples = 24) {
  Family up = fam.shifted(1);
  auto [xlo, xhi] = sample_window(fam);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    double x = xlo + (xhi - xlo) * (k + 0.5) / samples;
    if (fam.id() == FamilyId::H && std::abs(x) < 0.05) continue;
    double lhs = fam.dw(x) * fam.dw(x) - fam.d2w(x);
    double rhs = up.dw(x) * up.dw(x) + up.d2w(x) + fam.energy(1);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Ladder operators from the Heisenberg solution
// ---------------------------------------------------------------------------

struct LadderOperators {
  DMat a_plus, a_minus;
  DMat alpha_plus_h, alpha_minus_h, rm1_r0inv_h;
};

inline LadderOperators ladder_operators(const Family& fam, const OperatorSet& os) {
  ClosureData cd = fam.closure();
  for (double lam : os.spec.eigenvalues) {
    if (std::abs(cd.R0(lam)) < 1e-12 * std::max(1.0, lam * lam))
      throw degeneracy_error("R0 vanishes on the spectrum");
    if (closure_discriminant(cd, lam) < 0.0)
      throw degeneracy_error("negative closure discriminant on the spectrum");
  }
  LadderOperators lo;
  lo.alpha_plus_h = matrix_function(os, [&](double y) { return alpha_plus(cd, y); });
  lo.alpha_minus_h = matrix_function(os, [&](double y) { return alpha_minus(cd, y); });
  lo.rm1_r0inv_h = matrix_function(os, [&](double y) { return cd.Rm1(y) / cd.R0(y); });
  DMat gap_inv = matrix_function(
      os, [&](double y) { return 1.0 / (alpha_plus(cd, y) - alpha_minus(cd, y)); });
  DMat heta = commutator(os.H, os.eta);
  DMat shifted_eta = os.eta + lo.rm1_r0inv_h;
  lo.a_plus = gap_inv * (heta + lo.alpha_plus_h * shifted_eta);
  DMat am = gap_inv * (heta + lo.alpha_minus_h * shifted_eta);
  lo.a_minus = am * (-1.0);
  return lo;
}

struct LadderReport {
  double hermiticity = 0.0;      // ||a+ - (a-)^T||
  double raise_coeff = 0.0;      // a+ phi_n = A_n phi_{n+1}
  double lower_coeff = 0.0;      // a- phi_n = C_n phi_{n-1}
  double commutation = 0.0;      // [H, a+-] = a+- alpha+-(H)
  double number_op = 0.0;        // a- a+ phi_n = A_n C_{n+1} phi_n
  double offdiag = 0.0;          // a-+ a+- diagonal in the eigenbasis
  double eta_tridiag = 0.0;      // eta in the eigenbasis vs (A_n, B_n, C_n)
};

inline LadderReport ladder_report(const Family& fam, const OperatorSet& os,
                                  const LadderOperators& lo) {
  LadderReport rep;
  int dim = os.dim;
  int n_good = std::min(reliable_modes(fam), dim - 1);
  if (!fam.finite()) {
    // vector-level checks need the mode dead at the box edge
    while (n_good > 1) {
      double edge = std::sqrt(fam.norm_constant(n_good) * fam.phi0_squared_lattice(dim - 1)) *
                    std::abs(fam.P(n_good, double(dim - 1)));
      if (edge < 1e-12) break;
      --n_good;
    }
  }
  DMat amT = lo.a_minus.transpose();
  rep.hermiticity = max_abs(lo.a_plus - amT) / std::max(1.0, max_abs(lo.a_plus));

  RecurrenceCoeffs rc = recurrence_coeffs_rdqm(fam, n_good + 1);
  // unnormalized eigenfunctions phi_n(x) = phi0(x) P_n(eta(x))
  std::vector<std::vector<double>> phi(n_good + 2, std::vector<double>(dim));
  for (int n = 0; n <= n_good + 1; ++n)
    for (int x = 0; x < dim; ++x)
      phi[n][x] = std::sqrt(fam.phi0_squared_lattice(x)) * fam.P(n, double(x));
  auto scaled_diff = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0, d = 0.0;
    for (int x = 0; x < dim; ++x) {
      s = std::max(s, std::abs(b[x]));
      d = std::max(d, std::abs(a[x] - b[x]));
    }
    return d / std::max(1.0, s);
  };
  for (int n = 0; n < n_good; ++n) {
    std::vector<double> up = lo.a_plus * phi[n];
    std::vector<double> tgt(dim);
    for (int x = 0; x < dim; ++x) tgt[x] = rc.A[n] * phi[n + 1][x];
    rep.raise_coeff = std::max(rep.raise_coeff, scaled_diff(up, tgt));
    std::vector<double> dn = lo.a_minus * phi[n];
    for (int x = 0; x < dim; ++x) tgt[x] = (n >= 1) ? rc.C[n] * phi[n - 1][x] : 0.0;
    rep.lower_coeff = std::max(rep.lower_coeff, scaled_diff(dn, tgt));
    std::vector<double> nn = lo.a_minus * (lo.a_plus * phi[n]);
    for (int x = 0; x < dim; ++x) tgt[x] = rc.A[n] * rc.C[n + 1] * phi[n][x];
    rep.number_op = std::max(rep.number_op, scaled_diff(nn, tgt));
  }
  // [H, a+-] = a+- alpha+-(H)
  DMat c1 = commutator(os.H, lo.a_plus) - lo.a_plus * lo.alpha_plus_h;
  DMat c2 = commutator(os.H, lo.a_minus) - lo.a_minus * lo.alpha_minus_h;
  double hs = std::max(1.0, max_abs(os.H) * std::max(max_abs(lo.a_plus), max_abs(lo.a_minus)));
  rep.commutation = std::max(detail::max_abs_block(c1, os.interior),
                             detail::max_abs_block(c2, os.interior)) /
                    hs;
  // diagonality of a- a+ and a+ a- in the eigenbasis
  DMat mp = lo.a_minus * lo.a_plus;
  DMat pm = lo.a_plus * lo.a_minus;
  const DMat& v = os.spec.eigenvectors;
  DMat mp_e = v.transpose() * mp * v;
  DMat pm_e = v.transpose() * pm * v;
  double sc = std::max(1.0, std::max(max_abs(mp_e), max_abs(pm_e)));
  for (int i = 0; i < n_good; ++i)
    for (int j = 0; j < n_good; ++j) {
      if (i == j) continue;
      rep.offdiag = std::max(rep.offdiag, std::abs(mp_e(i, j)) / sc);
      rep.offdiag = std::max(rep.offdiag, std::abs(pm_e(i, j)) / sc);
    }
  // eta in the eigenbasis is tridiagonal with entries set by (A_n, B_n, C_n)
  DMat eta_e = v.transpose() * os.eta * v;
  double esc = std::max(1.0, max_abs(eta_e));
  for (int n = 0; n < n_good; ++n) {
    double dn = std::sqrt(fam.norm_constant(n));
    double dn1 = std::sqrt(fam.norm_constant(n + 1));
    rep.eta_tridiag =
        std::max(rep.eta_tridiag, std::abs(eta_e(n, n) - rc.B[n]) / esc);
    rep.eta_tridiag =
        std::max(rep.eta_tridiag, std::abs(eta_e(n + 1, n) - rc.A[n] * dn / dn1) / esc);
    for (int m = n + 2; m < n_good; ++m)
      rep.eta_tridiag = std::max(rep.eta_tridiag, std::abs(eta_e(m, n)) / esc);
  }
  return rep;
}

// Heisenberg evolution: e^{itH} eta e^{-itH} against the closed form built
// from alpha+-(H) and R-1 R0^{-1}. Finite families compare full matrices;
// truncated ones compare the reliable eigen-sector.
inline double heisenberg_residual(const Family& fam, const OperatorSet& os,
                                  const std::vector<double>& t_samples) {
  ClosureData cd = fam.closure();
  const DMat& v = os.spec.eigenvectors;
  int dim = os.dim;
  double worst = 0.0;
  DMat heta = commutator(os.H, os.eta);
  DMat rm1r0 = matrix_function(os, [&](double y) { return cd.Rm1(y) / cd.R0(y); });
  DMat shifted_eta = os.eta + rm1r0;
  for (double t : t_samples) {
    ZMat u = matrix_function_c(os, [&](double y) { return std::exp(cplx(0.0, t * y)); });
    ZMat ud = matrix_function_c(os, [&](double y) { return std::exp(cplx(0.0, -t * y)); });
    ZMat lhs = u * to_complex(os.eta) * ud;
    auto g1 = [&](double y) {
      double ap = alpha_plus(cd, y), am = alpha_minus(cd, y);
      return (std::exp(cplx(0.0, ap * t)) - std::exp(cplx(0.0, am * t))) / (ap - am);
    };
    auto g2 = [&](double y) {
      double ap = alpha_plus(cd, y), am = alpha_minus(cd, y);
      return (-am * std::exp(cplx(0.0, ap * t)) + ap * std::exp(cplx(0.0, am * t))) / (ap - am);
    };
    ZMat rhs = to_complex(heta) * matrix_function_c(os, g1) - to_complex(rm1r0) +
               to_complex(shifted_eta) * matrix_function_c(os, g2);
    ZMat diff = lhs - rhs;
    double scale = std::max(1.0, max_abs(os.eta));
    if (fam.finite()) {
      worst = std::max(worst, max_abs(diff) / scale);
    } else {
      int n_good = std::min(reliable_modes(fam), dim);
      double blk = 0.0;
      for (int a = 0; a < n_good; ++a)
        for (int b = 0; b < n_good; ++b) {
          cplx s = 0.0;
          for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) s += v(i, a) * diff(i, j) * v(j, b);
          blk = std::max(blk, std::abs(s));
        }
      worst = std::max(worst, blk / scale);
    }
  }
  return worst;
}

// the two cubic relations generated by expanding the closure and dual
// closure; v00 is the constant coefficient of the L = 2 potential spec
inline std::pair<double, double> askey_wilson_algebra_residual(const Family& fam,
                                                               const OperatorSet& os, double v00) {
  ClosureData cd = fam.closure();
  const DMat& H = os.H;
  const DMat& eta = os.eta;
  double r11 = cd.r1[0], r10 = cd.r1[1];
  double r00c = cd.r0[2];
  double rm12 = cd.rm1[0], rm11 = cd.rm1[1], rm10 = cd.rm1[2];
  DMat H2 = H * H;
  DMat eta2 = eta * eta;
  DMat lhs1 = H2 * eta - (H * eta * H) * (2.0 + r11) + eta * H2 - (H * eta + eta * H) * r10 -
              eta * r00c;
  DMat rhs1 = H2 * rm12 + H * rm11 + DMat::identity(os.dim) * rm10;
  double h = max_abs(H);
  double r1 = detail::max_abs_block(lhs1 - rhs1, os.interior) / (h * h * std::max(1.0, max_abs(eta)));

  double e_p = fam.eta(1.0), e_m = fam.eta(-1.0);  // eta(-i beta), eta(+i beta)
  DMat lhs2 = eta2 * H - (eta * H * eta) * (2.0 + r11) + H * eta2 - (eta * H + H * eta) * rm12 +
              H * (e_p * e_m);
  DMat rhs2 = eta2 * r10 + eta * rm11 + DMat::identity(os.dim) * (-v00);
  double e = std::max(1.0, max_abs(eta));
  double r2 = detail::max_abs_block(lhs2 - rhs2, os.interior) / (e * e * h);
  return {r1, r2};
}

}  // namespace dqm
