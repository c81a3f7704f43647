#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dqm/config.hpp"
#include "dqm/crum.hpp"
#include "dqm/exceptional.hpp"
#include "dqm/family.hpp"
#include "dqm/lattice.hpp"
#include "dqm/operators.hpp"
#include "dqm/polynomial.hpp"
#include "dqm/quadrature.hpp"
#include "dqm/random.hpp"
#include "dqm/report.hpp"
#include "dqm/unified.hpp"

namespace dqm {

struct VerifyOptions {
  uint64_t seed = 1;
  double tol_scale = 1.0;  // multiplies every default tolerance
  std::optional<FamilyId> family;  // restrict family-parametrized checks
  std::optional<int> N;            // lattice size override for finite families
  std::optional<ParameterVector> params;  // explicit parameters override
};

namespace detail {

inline bool family_selected(const VerifyOptions& o, FamilyId id) {
  return !o.family || *o.family == id;
}

inline Family family_for(const VerifyOptions& o, FamilyId id, int default_N, uint64_t salt) {
  if (o.params && o.family && *o.family == id) return Family::make(id, *o.params);
  int N = o.N ? *o.N : default_N;
  Rng rng(o.seed + salt);
  return Family::make(id, draw_params(id, N, rng));
}

inline Family meixner_ref() {
  ParameterVector pv;
  pv.values["beta"] = 2.0;
  pv.values["c"] = 0.5;
  return Family::make(FamilyId::M, pv);
}

}  // namespace detail

// 1. spectral solvability: dense spectra match the closed-form energies
inline Report suite_spectral(const VerifyOptions& o) {
  Report rep;
  rep.suite = "spectral";
  rep.seed = o.seed;
  WallTimer t;
  for (FamilyId id : {FamilyId::R, FamilyId::qR}) {
    if (!detail::family_selected(o, id)) continue;
    for (int draw = 0; draw < 3; ++draw) {
      Family f = detail::family_for(o, id, 10, 100 + draw);
      SpectralDecomposition sd = eigendecompose(build_hamiltonian(f));
      std::string id_s = std::string("spectral.") + family_name(id) + ".draw" + std::to_string(draw);
      rep.add(id_s, "dense spectrum vs closed-form energies, max relative deviation",
              spectrum_residual(f, sd), 1e-10 * o.tol_scale);
      rep.add(id_s + ".psd", "positive semi-definiteness: -min(eigenvalue)/||H||",
              std::max(0.0, -sd.eigenvalues.front() / sd.eigenvalues.back()), 1e-10 * o.tol_scale);
      if (o.params) break;
    }
  }
  if (detail::family_selected(o, FamilyId::M)) {
    Family m = detail::meixner_ref();
    SpectralDecomposition sd = eigendecompose(build_hamiltonian(m));
    rep.add("spectral.M.truncated",
            "lowest ceil(x_trunc/4) eigenvalues of the truncated box vs E(n)=n",
            spectrum_residual(m, sd), 1e-8 * o.tol_scale);
  }
  rep.wall_ms = t.ms();
  return rep;
}

// 2. orthogonality: lattice Gram matrices and oQM quadrature norms
inline Report suite_orthogonality(const VerifyOptions& o) {
  Report rep;
  rep.suite = "orthogonality";
  rep.seed = o.seed;
  WallTimer t;
  for (FamilyId id : {FamilyId::R, FamilyId::qR}) {
    if (!detail::family_selected(o, id)) continue;
    Family f = detail::family_for(o, id, 8, 200);
    rep.add(std::string("orthogonality.") + family_name(id),
            "Gram matrix with closed-form norms, ||G-I||_max", orthogonality_residual(f),
            1e-10 * o.tol_scale);
  }
  if (detail::family_selected(o, FamilyId::M)) {
    Family m = detail::meixner_ref();
    rep.add("orthogonality.M.truncated", "truncated-lattice Gram with closed-form norms",
            orthogonality_residual(m), 1e-8 * o.tol_scale);
  }
  for (FamilyId id : {FamilyId::H, FamilyId::L, FamilyId::J}) {
    if (!detail::family_selected(o, id)) continue;
    Family f = detail::family_for(o, id, 0, 210);
    IntegrationDomain dom = family_domain(f);
    double worst = 0.0;
    for (int n = 0; n <= 6; ++n)
      for (int m = n; m <= 6; ++m) {
        double v = integrate(
            [&](double x) { return f.phi0_squared(x) * f.P(n, x) * f.P(m, x); }, dom, 1e-12, 1e-12);
        double g = v / std::sqrt(f.norm_constant(n) * f.norm_constant(m));
        worst = std::max(worst, std::abs(g - (n == m ? 1.0 : 0.0)));
      }
    rep.add(std::string("orthogonality.") + family_name(id) + ".quadrature",
            "weighted quadrature vs closed-form norms, n <= 6", worst, 1e-9 * o.tol_scale);
  }
  if (detail::family_selected(o, FamilyId::H)) {
    Family h = Family::make(FamilyId::H, {});
    double v = integrate([&](double x) { return h.phi0_squared(x) * h.P(3, x) * h.P(3, x); },
                         family_domain(h), 1e-12, 1e-12);
    double target = 48.0 * std::sqrt(3.14159265358979323846);
    rep.add("orthogonality.H.h3", "explicit norm value at n = 3",
            std::abs(v - target) / target, 1e-9 * o.tol_scale);
  }
  rep.wall_ms = t.ms();
  return rep;
}

// 3. duality and completeness
inline Report suite_duality(const VerifyOptions& o) {
  Report rep;
  rep.suite = "duality";
  rep.seed = o.seed;
  WallTimer t;
  for (FamilyId id : {FamilyId::M, FamilyId::R, FamilyId::qR}) {
    if (!detail::family_selected(o, id)) continue;
    Family f = (id == FamilyId::M) ? detail::meixner_ref() : detail::family_for(o, id, 8, 300);
    DualityReport d = duality_check(f, 8);
    rep.add(std::string("duality.") + family_name(id),
            "max |P_n(eta(x)) - Q_x(E(n))| over the window", d.duality_max, 1e-10 * o.tol_scale);
    rep.add(std::string("completeness.") + family_name(id),
            "dual completeness sum vs identity (normalized)", d.completeness_max,
            1e-9 * o.tol_scale);
    if (f.finite()) {
      rep.add(std::string("characteristic.") + family_name(id),
              "characteristic-equation roots at the eigenvalues",
              characteristic_equation_residual(f), 1e-9 * o.tol_scale);
    }
  }
  rep.wall_ms = t.ms();
  return rep;
}

// 4. shape invariance and the Rodrigues ladder
inline Report suite_shape(const VerifyOptions& o) {
  Report rep;
  rep.suite = "shape";
  rep.seed = o.seed;
  WallTimer t;
  for (FamilyId id : {FamilyId::M, FamilyId::R, FamilyId::qR}) {
    if (!detail::family_selected(o, id)) continue;
    Family f = (id == FamilyId::M) ? detail::meixner_ref() : detail::family_for(o, id, 10, 400);
    ShapeInvarianceResidual r = shape_invariance_residual(f);
    rep.add(std::string("shape.") + family_name(id) + ".multiplicative",
            "multiplicative shape-invariance condition on the lattice", r.multiplicative,
            1e-11 * o.tol_scale);
    rep.add(std::string("shape.") + family_name(id) + ".additive",
            "additive shape-invariance condition on the lattice", r.additive,
            1e-11 * o.tol_scale);
  }
  for (FamilyId id : {FamilyId::H, FamilyId::L, FamilyId::J, FamilyId::MP, FamilyId::W,
                      FamilyId::AW, FamilyId::M, FamilyId::R, FamilyId::qR}) {
    if (!detail::family_selected(o, id)) continue;
    Family f = (id == FamilyId::M) ? detail::meixner_ref() : detail::family_for(o, id, 11, 410);
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
      if (f.finite() && n > f.N()) break;
      worst = std::max(worst, rodrigues_residual(f, n));
    }
    rep.add(std::string("rodrigues.") + family_name(id),
            "ladder evaluation vs terminating series, n <= 10", worst, 1e-9 * o.tol_scale);
  }
  rep.wall_ms = t.ms();
  return rep;
}

// 5. closure, ladder operators, Heisenberg evolution, dual closure
inline Report suite_closure(const VerifyOptions& o) {
  Report rep;
  rep.suite = "closure";
  rep.seed = o.seed;
  WallTimer t;
  for (FamilyId id : {FamilyId::M, FamilyId::R, FamilyId::qR}) {
    if (!detail::family_selected(o, id)) continue;
    Family f = (id == FamilyId::M) ? detail::meixner_ref() : detail::family_for(o, id, 8, 500);
    OperatorSet os = build_operators(f);
    std::string base = std::string("closure.") + family_name(id);
    rep.add(base, "double-commutator closure relation, matrix residual", closure_residual(f, os),
            1e-10 * o.tol_scale);
    rep.add(base + ".dual", "dual closure relation, matrix residual",
            dual_closure_residual(f, os), 1e-10 * o.tol_scale);
    LadderOperators lo = ladder_operators(f, os);
    LadderReport lr = ladder_report(f, os, lo);
    rep.add(base + ".ladder.raise", "raising action matches the recurrence A_n", lr.raise_coeff,
            1e-9 * o.tol_scale);
    rep.add(base + ".ladder.lower", "lowering action matches the recurrence C_n", lr.lower_coeff,
            1e-9 * o.tol_scale);
    rep.add(base + ".ladder.hermiticity", "raising operator is the transpose of the lowering one",
            lr.hermiticity, 1e-9 * o.tol_scale);
    rep.add(base + ".ladder.commutation", "[H, a+-] = a+- alpha+-(H)", lr.commutation,
            1e-9 * o.tol_scale);
    rep.add(base + ".ladder.number", "a- a+ eigenvalues A_n C_{n+1}", lr.number_op,
            1e-9 * o.tol_scale);
    rep.add(base + ".heisenberg", "time evolution of eta vs the two-frequency closed form",
            heisenberg_residual(f, os, {0.1, 0.5, 1.0}), 1e-8 * o.tol_scale);
    FittedSpec fs = fit_spec_to_family(f);
    auto [aw1, aw2] = askey_wilson_algebra_residual(f, os, fs.spec.at(0, 0));
    rep.add(base + ".cubic1", "expanded closure cubic relation", aw1, 1e-9 * o.tol_scale);
    rep.add(base + ".cubic2", "expanded dual-closure cubic relation", aw2, 1e-9 * o.tol_scale);
  }
  rep.wall_ms = t.ms();
  return rep;
}

// 6. Crum chains and Krein-Adler deletions
inline Report suite_crum(const VerifyOptions& o) {
  Report rep;
  rep.suite = "crum";
  rep.seed = o.seed;
  WallTimer t;
  if (detail::family_selected(o, FamilyId::R)) {
    Family r = detail::family_for(o, FamilyId::R, 6, 600);
    DeletedSystem sys = krein_adler(r, DeletionSet::make({1, 2}));
    rep.add("crum.R.spectrum", "rebuilt spectrum equals the surviving levels",
            deleted_spectrum_residual(r, sys), 1e-9 * o.tol_scale);
    NormIdentityReport nr = norm_identity_check(r, sys, 5);
    rep.add("crum.R.norms", "deleted-system norm identity", nr.max_residual, 1e-8 * o.tol_scale);
    rep.add("crum.R.positivity", "all deleted-system norms positive", nr.all_positive ? 0.0 : 1.0,
            0.5);
    rep.add("crum.R.bd_positive", "rebuilt potentials positive on the reduced lattice",
            sys.min_potential >= 0.0 ? 0.0 : 1.0, 0.5);
    bool rejected = false;
    try {
      krein_adler(r, DeletionSet::make({2}));
    } catch (const validity_error&) {
      rejected = true;
    }
    rep.add("crum.R.reject", "invalid deletion set {2} refused", rejected ? 0.0 : 1.0, 0.5);
    rep.add("crum.R.two_forms", "the two determinant product forms of the chain agree",
            crum_two_forms_residual(r, 2, 4), 1e-9 * o.tol_scale);
  }
  if (detail::family_selected(o, FamilyId::qR)) {
    Family q = detail::family_for(o, FamilyId::qR, 8, 610);
    DeletedSystem sys = krein_adler(q, DeletionSet::make({1, 2}));
    rep.add("crum.qR.spectrum", "rebuilt spectrum equals the surviving levels",
            deleted_spectrum_residual(q, sys), 1e-9 * o.tol_scale);
    NormIdentityReport nr = norm_identity_check(q, sys, 5);
    rep.add("crum.qR.norms", "deleted-system norm identity", nr.max_residual, 1e-8 * o.tol_scale);
  }
  if (detail::family_selected(o, FamilyId::M)) {
    Family m = detail::meixner_ref();
    DeletedSystem s1 = crum_chain(m, 1);
    rep.add("crum.M.spectrum", "one-step chain removes the lowest level",
            deleted_spectrum_residual(m, s1), 1e-8 * o.tol_scale);
    NormIdentityReport nr = norm_identity_check(m, s1, 4);
    rep.add("crum.M.norms", "chain norm identity", nr.max_residual, 1e-8 * o.tol_scale);
  }
  rep.wall_ms = t.ms();
  return rep;
}

// 7. unified construction: L=2 reconstruction, triangularity, recovery, QES
inline Report suite_unified(const VerifyOptions& o) {
  Report rep;
  rep.suite = "unified";
  rep.seed = o.seed;
  WallTimer t;
  for (FamilyId id : {FamilyId::M, FamilyId::R, FamilyId::qR}) {
    if (!detail::family_selected(o, id)) continue;
    Family f = (id == FamilyId::M) ? detail::meixner_ref() : detail::family_for(o, id, 9, 700);
    FittedSpec fs = fit_spec_to_family(f);
    rep.add(std::string("unified.fit.") + family_name(id),
            "L=2 coefficients reproduce the potentials on the whole lattice", fs.reproduce_max,
            1e-10 * o.tol_scale);
    SinusoidalCoordinate c = SinusoidalCoordinate::of(f);
    TriangularityCheck tc = triangularity_check(c, fs.spec, 6);
    rep.add(std::string("unified.triangular.") + family_name(id),
            "degree bound n+L-2 of the polynomial map (L=2)", tc.spurious_max, 1e-9 * o.tol_scale);
    double eworst = 0.0;
    for (int n = 0; n <= 6; ++n)
      eworst = std::max(eworst, std::abs(tc.l2_energies[n] - f.energy(n)) /
                                    std::max(1.0, std::abs(f.energy(n))));
    rep.add(std::string("unified.energies.") + family_name(id),
            "degree-n coefficients equal the closed-form energies", eworst, 1e-8 * o.tol_scale);
    rep.add(std::string("unified.bochner.") + family_name(id),
            "potentials recovered from n=1,2 recurrence data", bochner_recover(f, bochner_data(f)),
            1e-10 * o.tol_scale);
  }
  // the two defining properties across the whole catalog
  double addv = 0.0, mulv = 0.0;
  std::vector<SinusoidalCoordinate> cs;
  for (CoordKind k : {CoordKind::I1, CoordKind::I2, CoordKind::I3, CoordKind::I4, CoordKind::I5,
                      CoordKind::I6, CoordKind::I7, CoordKind::I8}) {
    SinusoidalCoordinate c;
    c.kind = k;
    c.gamma = 0.8;
    cs.push_back(c);
  }
  for (CoordKind k : {CoordKind::R1, CoordKind::R2, CoordKind::R3, CoordKind::R4, CoordKind::R5}) {
    SinusoidalCoordinate c;
    c.kind = k;
    c.q = 0.62;
    c.d = 0.8;
    cs.push_back(c);
  }
  for (const auto& c : cs) {
    CoordinatePropertyReport pr = coordinate_properties(c, 200, o.seed + 7);
    addv = std::max(addv, pr.shift_addition);
    mulv = std::max(mulv, pr.shift_multiplication);
  }
  rep.add("unified.catalog.addition", "symmetric shift-addition property, 13 coordinates", addv,
          1e-12 * o.tol_scale);
  rep.add("unified.catalog.multiplication", "symmetric shift-multiplication property, 13 coordinates",
          mulv, 1e-12 * o.tol_scale);
  // random higher-L triangularity and the QES compensation
  Rng rng(o.seed + 13);
  SinusoidalCoordinate lat;
  lat.kind = CoordKind::R1;
  for (int L : {3, 4}) {
    PotentialSpec s = PotentialSpec::zero(L);
    for (int l = 0; l <= 1; ++l)
      for (int k = 0; k + l <= L; ++k) s.at(k, l) = rng.uniform(-1.0, 1.0);
    if (!s.top_degree_nonzero()) s.at(L, 0) = 0.7;
    TriangularityCheck tc = triangularity_check(lat, s, 6);
    rep.add("unified.triangular.L" + std::to_string(L), "degree bound n+L-2, random coefficients",
            tc.spurious_max, 1e-9 * o.tol_scale);
    for (int M : {2, 5}) {
      PotentialSpec sp = (L == 4) ? qes_l4_tune(lat, s, M) : s;
      QesResult qr = qes_compensation(lat, sp, M);
      rep.add("unified.qes.L" + std::to_string(L) + ".M" + std::to_string(M),
              "invariant-subspace residual after the derived compensation", qr.invariance_max,
              1e-9 * o.tol_scale);
      if (L == 4)
        rep.add("unified.qes.L4.M" + std::to_string(M) + ".constraint",
                "over-determined compensation consistency", qr.constraint_residual,
                1e-9 * o.tol_scale);
    }
  }
  rep.wall_ms = t.ms();
  return rep;
}

// 8. exceptional families
inline Report suite_exceptional(const VerifyOptions& o) {
  Report rep;
  rep.suite = "exceptional";
  rep.seed = o.seed;
  WallTimer t;
  for (XKind k : {XKind::XM, XKind::XR, XKind::XqR}) {
    FamilyId bid = xkind_base(k);
    if (!detail::family_selected(o, bid)) continue;
    Family base = (k == XKind::XM) ? detail::meixner_ref()
                                   : detail::family_for(o, bid, 10, 800 + int(k));
    for (int ell : {1, 2}) {
      DeformedRdqm d = DeformedRdqm::make(k, base, ell);
      std::string tag = std::string("exceptional.") + xkind_name(k) + ".l" + std::to_string(ell);
      rep.add(tag + ".xi_positive", "deforming polynomial positive on the lattice",
              d.xi_min_on_lattice() > 0.0 ? 0.0 : 1.0, 0.5);
      rep.add(tag + ".spectrum", "deformed spectrum equals the shifted closed form",
              deformed_spectrum_residual(d), 1e-9 * o.tol_scale);
      rep.add(tag + ".orthogonality", "deformed Gram with closed-form norms",
              deformed_orthogonality_residual(d), 1e-9 * o.tol_scale);
      IntertwinerReport ir = intertwiner_check_rdqm(d);
      rep.add(tag + ".intertwine.plus", "product of intertwiners equals the base Hamiltonian",
              ir.hplus, 1e-9 * o.tol_scale);
      rep.add(tag + ".intertwine.minus", "reversed product equals the deformed Hamiltonian",
              ir.hminus, 1e-9 * o.tol_scale);
      rep.add(tag + ".intertwine.forward", "forward map sends base to deformed polynomials",
              ir.fhat_action, 1e-9 * o.tol_scale);
      rep.add(tag + ".intertwine.backward", "backward map sends deformed to base polynomials",
              ir.bhat_action, 1e-9 * o.tol_scale);
      rep.add(tag + ".intertwine.energy", "isospectral energy split identity", ir.energy_split,
              1e-9 * o.tol_scale);
      XiIdentityReport xi = xi_identities_rdqm(d);
      rep.add(tag + ".xi", "deforming-polynomial ladder identities and equation",
              std::max({xi.forward, xi.backward, xi.diffeq}), 1e-9 * o.tol_scale);
      ShapeInvarianceResidual si = deformed_shape_invariance_rdqm(d);
      rep.add(tag + ".shape", "deformed shape invariance", std::max(si.multiplicative, si.additive),
              1e-10 * o.tol_scale);
      int bad = 0;
      for (int n : {1, 2, 3}) {
        ZeroDegreeReport z = zero_degree_check_rdqm(d, n);
        if (z.sign_changes != n || !z.degree_ok) ++bad;
      }
      rep.add(tag + ".zeros_degree", "n sign changes and degree ell+n for tested n", double(bad),
              0.5);
    }
  }
  for (XKind k : {XKind::XL1, XKind::XL2, XKind::XJ1, XKind::XJ2}) {
    if (o.family && *o.family != xkind_base(k)) continue;
    ParameterVector pv;
    Rng rng(o.seed + 900 + int(k));
    pv.values["g"] = (k == XKind::XL2) ? 3.0 : rng.uniform(1.4, 2.8);
    if (xkind_base(k) == FamilyId::J) pv.values["h"] = rng.uniform(3.1, 4.3);
    Family base = Family::make(xkind_base(k), pv);
    for (int ell : {1, 2}) {
      DeformedOqm d = DeformedOqm::make(k, base, ell);
      std::string tag = std::string("exceptional.") + xkind_name(k) + ".l" + std::to_string(ell);
      rep.add(tag + ".orthogonality", "quadrature Gram with closed-form norms",
              deformed_orthogonality_oqm(d, 4), 1e-7 * o.tol_scale);
      int bad = 0;
      for (int n : {1, 2, 3}) {
        ZeroDegreeReport z = zero_degree_check_oqm(d, n);
        if (z.sign_changes != n || !z.degree_ok) ++bad;
      }
      rep.add(tag + ".zeros_degree", "n sign changes and degree ell+n for tested n", double(bad),
              0.5);
      IntertwinerReport ir = intertwiner_check_oqm(d);
      rep.add(tag + ".intertwine", "forward/backward maps and the energy split",
              std::max({ir.fhat_action, ir.bhat_action, ir.hplus, ir.energy_split}),
              1e-8 * o.tol_scale);
    }
  }
  if (!o.family || *o.family == FamilyId::J) {
    rep.add("exceptional.XJ.mirror", "mirror identity between the two constructions",
            std::max(xj_mirror_residual(2.0, 3.0, 1, 2), xj_mirror_residual(2.5, 1.3, 2, 3)),
            1e-11 * o.tol_scale);
  }
  rep.wall_ms = t.ms();
  return rep;
}

// 9. idQM pointwise suite
inline Report suite_idqm(const VerifyOptions& o) {
  Report rep;
  rep.suite = "idqm";
  rep.seed = o.seed;
  WallTimer t;
  struct Cfg {
    XKind k;
    int ell;
  };
  for (Cfg c : {Cfg{XKind::XMP, 2}, Cfg{XKind::XAW, 1}}) {
    if (o.family && *o.family != xkind_base(c.k)) continue;
    Rng rng(o.seed + 950 + int(c.k));
    Family base = draw_x_base(c.k, 0, rng);
    DeformedIdqm d = DeformedIdqm::make(c.k, base, c.ell);
    std::string tag = std::string("idqm.") + xkind_name(c.k) + ".l" + std::to_string(c.ell);
    XiIdentityReport xi = xi_identities_idqm(d, 100, o.seed + 3);
    rep.add(tag + ".xi.forward", "deforming-polynomial forward identity at 100 complex points",
            xi.forward, 1e-9 * o.tol_scale);
    rep.add(tag + ".xi.backward", "deforming-polynomial backward identity at 100 complex points",
            xi.backward, 1e-9 * o.tol_scale);
    rep.add(tag + ".xi.diffeq", "deforming-polynomial difference equation at 100 complex points",
            xi.diffeq, 1e-9 * o.tol_scale);
    rep.add(tag + ".xi_zero_free", "no zero on the analyticity rectangle",
            d.xi_min_on_rectangle() > 0.0 ? 0.0 : 1.0, 0.5);
    IntertwinerReport ir = intertwiner_check_idqm(d, 3, 20, o.seed + 5);
    rep.add(tag + ".intertwine", "forward/backward maps and factorized polynomial Hamiltonians",
            std::max({ir.bhat_action, ir.hplus, ir.hminus, ir.energy_split}), 1e-9 * o.tol_scale);
  }
  for (FamilyId id : {FamilyId::MP, FamilyId::W, FamilyId::AW}) {
    if (!detail::family_selected(o, id)) continue;
    Family f = detail::family_for(o, id, 0, 960);
    rep.add(std::string("idqm.diffeq.") + family_name(id),
            "base difference equation at complex points, n <= 6",
            base_diffeq_residual_idqm(f, 6, 30, o.seed + 9), 1e-9 * o.tol_scale);
  }
  rep.wall_ms = t.ms();
  return rep;
}

// 10. negative controls
inline Report suite_negative(const VerifyOptions& o) {
  Report rep;
  rep.suite = "negative";
  rep.seed = o.seed;
  WallTimer t;
  bool rejected = false;
  try {
    ParameterVector pv;
    pv.N = 4;
    pv.q_base = 0.6;
    pv.values["d"] = 0.5;
    pv.values["b"] = 10.0;
    pv.values["c"] = 0.8;
    Family::make(FamilyId::qR, pv);
  } catch (const parameter_error&) {
    rejected = true;
  }
  rep.add("negative.qR.range", "invalid parameter set (ab >= d) rejected", rejected ? 0.0 : 1.0,
          0.5);
  Family m = detail::meixner_ref();
  Family r = detail::family_for(o, FamilyId::R, 8, 980);
  double dev = bochner_recover(m, bochner_data(r));
  rep.add("negative.bochner", "mismatched recurrence data yields order-1 deviation",
          dev > 0.1 ? 0.0 : 1.0, 0.5);
  bool del_rejected = false;
  try {
    DeletionSet::make({2});
  } catch (const validity_error&) {
    del_rejected = true;
  }
  rep.add("negative.deletion", "invalid deletion set {2} refused", del_rejected ? 0.0 : 1.0, 0.5);
  rep.wall_ms = t.ms();
  return rep;
}

inline std::vector<Report> run_suites(const std::string& which, const VerifyOptions& o) {
  std::vector<Report> out;
  auto want = [&](const std::string& s) { return which == "all" || which == s; };
  if (want("spectral")) out.push_back(suite_spectral(o));
  if (want("orthogonality")) out.push_back(suite_orthogonality(o));
  if (want("duality")) out.push_back(suite_duality(o));
  if (want("shape")) out.push_back(suite_shape(o));
  if (want("closure") || which == "ladder" || which == "heisenberg")
    out.push_back(suite_closure(o));
  if (want("crum")) out.push_back(suite_crum(o));
  if (want("unified")) out.push_back(suite_unified(o));
  if (want("exceptional")) out.push_back(suite_exceptional(o));
  if (want("idqm")) out.push_back(suite_idqm(o));
  if (want("negative")) out.push_back(suite_negative(o));
  if (out.empty()) throw parameter_error("unknown suite: " + which);
  return out;
}

}  // namespace dqm
