#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "dqm/family.hpp"
#include "dqm/linalg.hpp"
#include "dqm/polynomial.hpp"

namespace dqm {

// The sinusoidal-coordinate catalog: eight idQM entries and five rdQM
// entries. The defining data are the evaluator with complex continuation,
// the shift parameter, and the two structure constants r1^(1), r-1^(2).
enum class CoordKind {
  I1, I2, I3, I4, I5, I6, I7, I8,      // idQM: x, x^2, 1-cos x, sin x, 1-e^-x, e^x-1, cosh x -1, sinh x
  R1, R2, R3, R4, R5                   // rdQM: x, e'x(x+d), 1-q^x, q^-x-1, e'(q^-x-1)(1-dq^x)
};

inline const char* coord_name(CoordKind k) {
  switch (k) {
    case CoordKind::I1: return "i";
    case CoordKind::I2: return "ii";
    case CoordKind::I3: return "iii";
    case CoordKind::I4: return "iv";
    case CoordKind::I5: return "v";
    case CoordKind::I6: return "vi";
    case CoordKind::I7: return "vii";
    case CoordKind::I8: return "viii";
    case CoordKind::R1: return "i'";
    case CoordKind::R2: return "ii'";
    case CoordKind::R3: return "iii'";
    case CoordKind::R4: return "iv'";
    case CoordKind::R5: return "v'";
  }
  return "?";
}

struct SinusoidalCoordinate {
  CoordKind kind = CoordKind::R1;
  double gamma = 1.0;  // idQM shift
  double q = 0.6;      // rdQM q-coordinates
  double d = 0.5;      // (ii)' and (v)'
  int eps_prime = 1;   // sign choice of (ii)' and (v)'

  bool rdqm() const { return kind >= CoordKind::R1; }
  double epsilon() const { return rdqm() ? -1.0 : 1.0; }

  cplx eta(cplx x) const {
    switch (kind) {
      case CoordKind::I1: return x;
      case CoordKind::I2: return x * x;
      case CoordKind::I3: return 1.0 - std::cos(x);
      case CoordKind::I4: return std::sin(x);
      case CoordKind::I5: return 1.0 - std::exp(-x);
      case CoordKind::I6: return std::exp(x) - 1.0;
      case CoordKind::I7: return std::cosh(x) - 1.0;
      case CoordKind::I8: return std::sinh(x);
      case CoordKind::R1: return x;
      case CoordKind::R2: return double(eps_prime) * x * (x + d);
      case CoordKind::R3: return 1.0 - std::pow(q, x);
      case CoordKind::R4: return std::pow(q, -x) - 1.0;
      case CoordKind::R5:
        return double(eps_prime) * (std::pow(q, -x) - 1.0) * (1.0 - d * std::pow(q, x));
    }
    return {};
  }
  double eta(double x) const { return eta(cplx(x, 0.0)).real(); }

  // eta(x - i beta) and eta(x + i beta); real shifts move x by +-1
  cplx eta_mshift(cplx x) const { return rdqm() ? eta(x + 1.0) : eta(x - cplx(0.0, gamma)); }
  cplx eta_pshift(cplx x) const { return rdqm() ? eta(x - 1.0) : eta(x + cplx(0.0, gamma)); }
  cplx eta_at_mib() const { return rdqm() ? eta(cplx(1.0, 0.0)) : eta(cplx(0.0, -gamma)); }
  cplx eta_at_pib() const { return rdqm() ? eta(cplx(-1.0, 0.0)) : eta(cplx(0.0, gamma)); }

  double r11() const {
    switch (kind) {
      case CoordKind::I1:
      case CoordKind::I2:
      case CoordKind::R1:
      case CoordKind::R2: return 0.0;
      case CoordKind::I3:
      case CoordKind::I4: return 2.0 * std::cosh(gamma) - 2.0;
      case CoordKind::I5:
      case CoordKind::I6:
      case CoordKind::I7:
      case CoordKind::I8: return 2.0 * std::cos(gamma) - 2.0;
      default: return q + 1.0 / q - 2.0;
    }
  }
  double rm12() const {
    switch (kind) {
      case CoordKind::I1:
      case CoordKind::I4:
      case CoordKind::I8:
      case CoordKind::R1: return 0.0;
      case CoordKind::I2: return -2.0 * gamma * gamma;
      case CoordKind::I3: return 2.0 - 2.0 * std::cosh(gamma);
      case CoordKind::I5: return 2.0 - 2.0 * std::cos(gamma);
      case CoordKind::I6:
      case CoordKind::I7: return 2.0 * std::cos(gamma) - 2.0;
      case CoordKind::R2: return 2.0 * eps_prime;
      case CoordKind::R3: return -(q + 1.0 / q - 2.0);
      case CoordKind::R4: return q + 1.0 / q - 2.0;
      case CoordKind::R5: return eps_prime * (1.0 + d) * (q + 1.0 / q - 2.0);
    }
    return 0.0;
  }

  // sampling window for fits
  std::pair<double, double> window() const {
    switch (kind) {
      case CoordKind::I1: return {-2.5, 2.5};
      case CoordKind::I2: return {0.3, 2.6};
      case CoordKind::I3: return {0.35, 2.75};
      case CoordKind::I4: return {-1.25, 1.25};
      case CoordKind::I5: return {-1.6, 1.6};
      case CoordKind::I6: return {-1.6, 1.6};
      case CoordKind::I7: return {0.3, 2.5};
      case CoordKind::I8: return {-1.8, 1.8};
      default: return {0.15, 11.5};
    }
  }

  // matching catalog entry of an rdQM family
  static SinusoidalCoordinate of(const Family& fam) {
    SinusoidalCoordinate c;
    switch (fam.id()) {
      case FamilyId::M:
        c.kind = CoordKind::R1;
        break;
      case FamilyId::R:
        c.kind = CoordKind::R2;
        c.d = fam.par("d");
        break;
      case FamilyId::qR:
        c.kind = CoordKind::R5;
        c.d = fam.par("d");
        c.q = fam.q();
        break;
      default: throw domain_error("catalog coordinate lookup is rdQM only");
    }
    return c;
  }
};

// both defining properties, checked at (complex-shifted) sample points
struct CoordinatePropertyReport {
  double shift_addition = 0.0;
  double shift_multiplication = 0.0;
};

inline CoordinatePropertyReport coordinate_properties(const SinusoidalCoordinate& c,
                                                      int samples = 200, uint64_t seed = 1234) {
  CoordinatePropertyReport rep;
  auto [lo, hi] = c.window();
  uint64_t state = seed;
  auto uni = [&]() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return double(state >> 11) * 0x1.0p-53;
  };
  for (int k = 0; k < samples; ++k) {
    cplx x(lo + (hi - lo) * uni(), 0.8 * (uni() - 0.5));
    cplx e0 = c.eta(x), ep = c.eta_mshift(x), em = c.eta_pshift(x);
    cplx add = ep + em - ((2.0 + c.r11()) * e0 + c.rm12());
    cplx mul = ep * em - (e0 - c.eta_at_mib()) * (e0 - c.eta_at_pib());
    double s1 = std::max({1.0, std::abs(ep), std::abs(em)});
    double s2 = std::max({1.0, std::abs(ep * em)});
    rep.shift_addition = std::max(rep.shift_addition, std::abs(add) / s1);
    rep.shift_multiplication = std::max(rep.shift_multiplication, std::abs(mul) / s2);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// v_{k,l} potentials
// ---------------------------------------------------------------------------

struct PotentialSpec {
  int L = 2;
  std::vector<double> v;  // packed: l=0: k=0..L, then l=1: k=0..L-1

  static int count(int L) { return 2 * L + 1; }
  double& at(int k, int l) { return v[l == 0 ? k : (L + 1 + k)]; }
  double at(int k, int l) const { return v[l == 0 ? k : (L + 1 + k)]; }

  static PotentialSpec zero(int L) {
    PotentialSpec s;
    s.L = L;
    s.v.assign(count(L), 0.0);
    return s;
  }
  bool top_degree_nonzero() const {
    double t = std::abs(at(L, 0));
    if (L >= 1) t += std::abs(at(L - 1, 1));
    return t > 0.0;
  }
};

// V+-(x) of the unified construction; x may be complex
struct PotentialPair {
  cplx Vp, Vm;
};

inline PotentialPair build_potentials(const SinusoidalCoordinate& c, const PotentialSpec& s,
                                      cplx x) {
  cplx e0 = c.eta(x), ep = c.eta_mshift(x), em = c.eta_pshift(x);
  if (std::abs(ep - e0) < 1e-14 || std::abs(em - e0) < 1e-14 || std::abs(ep - em) < 1e-14)
    throw domain_error("degenerate sinusoidal coordinate shifts at this point");
  cplx tp = 0.0, tm = 0.0;
  for (int l = 0; l <= 1; ++l)
    for (int k = 0; k + l <= s.L; ++k) {
      double vkl = s.at(k, l);
      if (vkl == 0.0) continue;
      tp += vkl * std::pow(e0, k) * std::pow(ep, l);
      tm += vkl * std::pow(e0, k) * std::pow(em, l);
    }
  PotentialPair pp;
  pp.Vp = tp / ((ep - e0) * (ep - em));
  pp.Vm = tm / ((em - e0) * (em - ep));
  return pp;
}

// H-tilde' f = eps(V+ (f(x-ib) - f(x)) + V- (f(x+ib) - f(x))) - e0c eta^2 f - e1c eta f
inline cplx htilde_apply(const SinusoidalCoordinate& c, const PotentialSpec& s,
                         const std::function<cplx(cplx)>& f, cplx x, double e0c = 0.0,
                         double e1c = 0.0) {
  PotentialPair pp = build_potentials(c, s, x);
  cplx xm = c.rdqm() ? x + 1.0 : x - cplx(0.0, c.gamma);
  cplx xp = c.rdqm() ? x - 1.0 : x + cplx(0.0, c.gamma);
  cplx r = c.epsilon() * (pp.Vp * (f(xm) - f(x)) + pp.Vm * (f(xp) - f(x)));
  cplx e0v = c.eta(x);
  return r - e0c * e0v * e0v * f(x) - e1c * e0v * f(x);
}

// fit of x -> g(x) as a polynomial in the centred coordinate (eta-ctr)/rad;
// the scaled basis keeps the Vandermonde conditioned, and "vanishes above
// degree j" is basis-independent under this triangular recombination
struct EtaExpansion {
  std::vector<double> scaled;  // Chebyshev coefficients in u = (eta-ctr)/rad
  double ctr = 0.0, rad = 1.0;
  double imag_max = 0.0;

  double coeff_scale() const {
    double s = 1.0;
    for (double v : scaled) s = std::max(s, std::abs(v));
    return s;
  }
  // coefficient of u^j from the Chebyshev form, valid when everything above
  // degree j vanishes (T_j has leading coefficient 2^{j-1}, and T_{j+1}
  // contributes nothing to u^j by parity)
  double u_coeff_top(int j) const {
    return j == 0 ? scaled[0] : scaled[j] * std::pow(2.0, j - 1);
  }
  // unscaled coefficient of eta^j under the same assumption
  double top_unscaled(int j) const { return u_coeff_top(j) / std::pow(rad, j); }
};

inline EtaExpansion eta_expansion_raw(const SinusoidalCoordinate& c,
                                      const std::function<cplx(cplx)>& g, int deg) {
  auto [lo, hi] = c.window();
  int pts = deg + 3;
  std::vector<double> xs(pts), etas(pts), vals(pts);
  double elo = c.eta(lo), ehi = c.eta(hi);
  bool flipped = elo > ehi;
  if (flipped) std::swap(elo, ehi);
  std::vector<double> targets = chebyshev_points(pts, elo, ehi);
  EtaExpansion out;
  for (int i = 0; i < pts; ++i) {
    double a = lo, b = hi;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (a + b);
      bool below = c.eta(mid) < targets[i];
      if (below != flipped)
        a = mid;
      else
        b = mid;
    }
    xs[i] = 0.5 * (a + b);
    etas[i] = c.eta(xs[i]);
    cplx v = g(cplx(xs[i], 0.0));
    vals[i] = v.real();
    out.imag_max = std::max(out.imag_max, std::abs(v.imag()));
  }
  out.ctr = 0.5 * (elo + ehi);
  out.rad = 0.5 * (ehi - elo);
  // Chebyshev-basis least squares: the u samples are Chebyshev points, so
  // the design matrix is essentially orthogonal
  DMat design(pts, deg + 1);
  for (int i = 0; i < pts; ++i) {
    double u = (etas[i] - out.ctr) / out.rad;
    double tm1 = 1.0, t = u;
    for (int j = 0; j <= deg; ++j) {
      design(i, j) = (j == 0) ? 1.0 : t;
      if (j >= 1) {
        double next = 2.0 * u * t - tm1;
        tm1 = t;
        t = next;
      }
    }
  }
  out.scaled = solve_least_squares(design, vals);
  return out;
}

struct TriangularityCheck {
  double spurious_max = 0.0;            // fitted coefficients above degree n+L-2
  double energy_max = 0.0;              // L=2 only: degree-n coefficient vs E-pattern
  std::vector<double> l2_energies;      // L=2: the extracted E(n)
  double imag_max = 0.0;
};

inline TriangularityCheck triangularity_check(const SinusoidalCoordinate& c,
                                              const PotentialSpec& s, int n_max) {
  TriangularityCheck rep;
  for (int n = 0; n <= n_max; ++n) {
    int deg = n + s.L;  // fit a margin above the claimed bound
    auto g = [&](cplx x) {
      return htilde_apply(c, s, [&](cplx y) { return std::pow(c.eta(y), n); }, x);
    };
    EtaExpansion ee = eta_expansion_raw(c, g, deg);
    rep.imag_max = std::max(rep.imag_max, ee.imag_max);
    double scale = ee.coeff_scale();
    for (int j = n + s.L - 1; j <= deg; ++j)
      rep.spurious_max = std::max(rep.spurious_max, std::abs(ee.scaled[j]) / scale);
    if (s.L == 2) rep.l2_energies.push_back(ee.top_unscaled(n));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// L = 2 fit to a family's B, D
// ---------------------------------------------------------------------------

struct FittedSpec {
  PotentialSpec spec;
  double fit_residual = 0.0;
  double reproduce_max = 0.0;  // max relative deviation of V+- from B, D lattice-wide
};

inline FittedSpec fit_spec_to_family(const Family& fam) {
  if (fam.category() != Category::rdQM) throw domain_error("L=2 fit implemented for rdQM");
  SinusoidalCoordinate c = SinusoidalCoordinate::of(fam);
  int n_unknown = PotentialSpec::count(2);
  int rows = 12;
  DMat a(2 * rows, n_unknown);
  std::vector<double> rhs(2 * rows);
  for (int i = 0; i < rows; ++i) {
    double x = 0.35 + 0.83 * i;  // off-lattice points, generic position
    double e0 = c.eta(x);
    double ep = c.eta_mshift(cplx(x, 0.0)).real();
    double em = c.eta_pshift(cplx(x, 0.0)).real();
    double denp = (ep - e0) * (ep - em);
    double denm = (em - e0) * (em - ep);
    int col = 0;
    for (int l = 0; l <= 1; ++l)
      for (int k = 0; k + l <= 2; ++k, ++col) {
        a(2 * i, col) = std::pow(e0, k) * std::pow(ep, l);
        a(2 * i + 1, col) = std::pow(e0, k) * std::pow(em, l);
      }
    // epsilon = -1 folds the rdQM sign into H-tilde, so B = V+, D = V-
    rhs[2 * i] = fam.B(x) * denp;
    rhs[2 * i + 1] = fam.D(x) * denm;
  }
  // row equilibration: the eta powers span many decades for the q-lattices
  for (int i = 0; i < 2 * rows; ++i) {
    double mx = std::abs(rhs[i]);
    for (int jc = 0; jc < n_unknown; ++jc) mx = std::max(mx, std::abs(a(i, jc)));
    if (mx > 0.0) {
      for (int jc = 0; jc < n_unknown; ++jc) a(i, jc) /= mx;
      rhs[i] /= mx;
    }
  }
  FittedSpec out;
  out.spec = PotentialSpec::zero(2);
  double res;
  auto sol = solve_least_squares(a, rhs, &res);
  int col = 0;
  for (int l = 0; l <= 1; ++l)
    for (int k = 0; k + l <= 2; ++k, ++col) out.spec.at(k, l) = sol[col];
  double scale = 0.0;
  for (double r : rhs) scale = std::max(scale, std::abs(r));
  out.fit_residual = res / std::max(1.0, scale);
  // verify on the whole lattice
  int xmax = fam.finite() ? fam.N() : fam.truncation();
  for (int x = 0; x <= xmax; ++x) {
    PotentialPair pp = build_potentials(c, out.spec, cplx(double(x), 0.0));
    double bx = fam.B(double(x)), dx = fam.D(double(x));
    if (fam.finite() && x == xmax) bx = 0.0;
    double sb = std::max({1.0, std::abs(bx)});
    double sd = std::max({1.0, std::abs(dx)});
    out.reproduce_max = std::max(out.reproduce_max, std::abs(pp.Vp.real() - bx) / sb);
    out.reproduce_max = std::max(out.reproduce_max, std::abs(pp.Vm.real() - dx) / sd);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bochner-style recovery of the potentials from n = 1, 2 data
// ---------------------------------------------------------------------------

struct BochnerData {
  double A0, B0, A1, B1, C1;  // recurrence data
  double E1, E2;
};

inline BochnerData bochner_data(const Family& fam) {
  RecurrenceCoeffs rc = recurrence_coeffs_rdqm(fam, 2);
  return {rc.A[0], rc.B[0], rc.A[1], rc.B[1], rc.C[1], fam.energy(1), fam.energy(2)};
}

// solve the 2x2 pointwise system from the n = 1, 2 rows of the difference
// equation and compare with the family's stored potentials; the elimination
// cancels heavily on the q-lattices, so it runs in double-double
inline double bochner_recover(const Family& fam, const BochnerData& bd) {
  if (fam.category() != Category::rdQM) throw domain_error("recovery implemented for rdQM");
  auto p1 = [&](const DDouble& e) { return (e - DDouble(bd.B0)) / DDouble(bd.A0); };
  auto p2 = [&](const DDouble& e) {
    return ((e - DDouble(bd.B0)) * (e - DDouble(bd.B1)) - DDouble(bd.A0) * DDouble(bd.C1)) /
           (DDouble(bd.A0) * DDouble(bd.A1));
  };
  const DDouble eps(-1.0);
  double worst = 0.0;
  int xmax = fam.finite() ? fam.N() : 20;
  for (int xi = 0; xi <= xmax; ++xi) {
    DDouble x(xi + 0.31);  // generic sample, away from degenerate shifts
    DDouble e0 = fam.eta_t(x), ep = fam.eta_t(x + DDouble(1.0)), em = fam.eta_t(x - DDouble(1.0));
    DDouble a = p1(ep) - p1(e0), b = p1(em) - p1(e0);
    DDouble c = p2(ep) - p2(e0), d = p2(em) - p2(e0);
    DDouble r1 = DDouble(bd.E1) * p1(e0) / eps, r2 = DDouble(bd.E2) * p2(e0) / eps;
    DDouble det = a * d - b * c;
    if (std::abs(to_double(det)) < 1e-300) continue;  // resample: degenerate point
    DDouble vB = (r1 * d - b * r2) / det;
    DDouble vD = (a * r2 - r1 * c) / det;
    double bx = fam.B(to_double(x)), dx = fam.D(to_double(x));
    worst = std::max(worst, std::abs(to_double(vB) - bx) / std::max(1.0, std::abs(bx)));
    worst = std::max(worst, std::abs(to_double(vD) - dx) / std::max(1.0, std::abs(dx)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Quasi-exact solvability (L = 3, 4)
// ---------------------------------------------------------------------------

struct QesResult {
  double e0 = 0.0;
  double e1 = 0.0;                  // L = 4 only
  double constraint_residual = 0.0; // L = 4: consistency of the over-determined system
  double invariance_max = 0.0;      // scaled coefficients above degree M after compensation
};

namespace detail {

inline EtaExpansion htilde_eta_power_raw(const SinusoidalCoordinate& c, const PotentialSpec& s,
                                         int m, int deg) {
  auto g = [&](cplx x) {
    return htilde_apply(c, s, [&](cplx y) { return std::pow(c.eta(y), m); }, x);
  };
  return eta_expansion_raw(c, g, deg);
}

}  // namespace detail

inline QesResult qes_compensation(const SinusoidalCoordinate& c, const PotentialSpec& s, int M) {
  if (s.L != 3 && s.L != 4) throw parameter_error("QES compensation needs L in {3,4}");
  QesResult r;
  int deg_top = M + s.L;
  EtaExpansion top = detail::htilde_eta_power_raw(c, s, M, deg_top);
  if (s.L == 3) {
    // only eta^{M+1} sticks out: its unscaled coefficient is e0(M)
    r.e0 = top.top_unscaled(M + 1);
  } else {
    r.e0 = top.top_unscaled(M + 2);
    // c_u[M+1] = rad^{M+1} (c_eta[M+1] + (M+2) ctr c_eta[M+2])
    r.e1 = top.u_coeff_top(M + 1) / std::pow(top.rad, M + 1) - (M + 2) * top.ctr * r.e0;
    if (M >= 1) {
      // over-determined: the next row must be killed by the same e0
      EtaExpansion row = detail::htilde_eta_power_raw(c, s, M - 1, deg_top);
      r.constraint_residual =
          std::abs(row.top_unscaled(M + 1) - r.e0) / std::max(1.0, std::abs(r.e0));
    }
  }
  // invariance of V_M under the compensated map
  for (int m = 0; m <= M; ++m) {
    auto g = [&](cplx x) {
      return htilde_apply(c, s, [&](cplx y) { return std::pow(c.eta(y), m); }, x,
                          s.L == 4 ? r.e0 : 0.0, s.L == 4 ? r.e1 : r.e0);
    };
    EtaExpansion ee = eta_expansion_raw(c, g, deg_top);
    double scale = ee.coeff_scale();
    for (int j = M + 1; j <= deg_top; ++j)
      r.invariance_max = std::max(r.invariance_max, std::abs(ee.scaled[j]) / scale);
  }
  return r;
}

// tune v_{3,1} of an L = 4 spec so the over-determined compensation system
// closes (the residual is linear in v_{3,1})
inline PotentialSpec qes_l4_tune(const SinusoidalCoordinate& c, PotentialSpec s, int M) {
  auto signed_residual = [&](double v31) {
    PotentialSpec t = s;
    t.at(3, 1) = v31;
    int deg_top = M + 4;
    EtaExpansion top = detail::htilde_eta_power_raw(c, t, M, deg_top);
    EtaExpansion row = detail::htilde_eta_power_raw(c, t, M - 1, deg_top);
    return row.top_unscaled(M + 1) - top.top_unscaled(M + 2);
  };
  double a = s.at(3, 1), fa = signed_residual(a);
  double b = a + 1.0, fb = signed_residual(b);
  double root = a - fa * (b - a) / (fb - fa);
  s.at(3, 1) = root;
  return s;
}

}  // namespace dqm
