#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dqm/operators.hpp"
#include "dqm/random.hpp"

using namespace dqm;

namespace {

Family meixner_ref() {
  ParameterVector pv;
  pv.values["beta"] = 2.0;
  pv.values["c"] = 0.5;
  return Family::make(FamilyId::M, pv);
}

Family draw(FamilyId id, int N, uint64_t seed) {
  Rng rng(seed);
  return Family::make(id, draw_params(id, N, rng));
}

}  // namespace

TEST_CASE("operator assembly") {
  for (FamilyId id : {FamilyId::M, FamilyId::R, FamilyId::qR}) {
    Family f = (id == FamilyId::M) ? meixner_ref() : draw(id, 8, 3);
    OperatorSet os = build_operators(f);
    CAPTURE(std::string(family_name(id)));
    CHECK(factorized_assembly_residual(os) < 1e-15);
    // A phi0 = 0
    std::vector<double> phi(os.dim);
    for (int x = 0; x < os.dim; ++x) phi[x] = std::sqrt(f.phi0_squared_lattice(x));
    std::vector<double> aphi = os.A * phi;
    double w = 0.0;
    for (double v : aphi) w = std::max(w, std::abs(v));
    CHECK(w < 1e-12 * max_abs(os.A));
    // H-tilde annihilates constants (interior rows)
    std::vector<double> ones(os.dim, 1.0);
    std::vector<double> hones = os.Htilde * ones;
    double w2 = 0.0;
    for (int x = 0; x < os.interior; ++x) w2 = std::max(w2, std::abs(hones[x]));
    CHECK(w2 < 1e-12 * max_abs(os.Htilde));
  }
}

TEST_CASE("closure relation residuals") {
  Family m = meixner_ref();
  OperatorSet osm = build_operators(m);
  CHECK(closure_residual(m, osm) < 1e-12);
  for (FamilyId id : {FamilyId::R, FamilyId::qR}) {
    Family f = draw(id, 8, 7);
    OperatorSet os = build_operators(f);
    CAPTURE(std::string(family_name(id)));
    CHECK(closure_residual(f, os) < 1e-10);
  }
}

TEST_CASE("dual closure residuals") {
  for (FamilyId id : {FamilyId::M, FamilyId::R, FamilyId::qR}) {
    Family f = (id == FamilyId::M) ? meixner_ref() : draw(id, 8, 11);
    OperatorSet os = build_operators(f);
    CAPTURE(std::string(family_name(id)));
    CHECK(dual_closure_residual(f, os) < 1e-12);
  }
}

TEST_CASE("shape invariance") {
  Family m = meixner_ref();
  ShapeInvarianceResidual rm = shape_invariance_residual(m);
  CHECK(rm.multiplicative < 1e-13);
  CHECK(rm.additive < 1e-13);
  for (FamilyId id : {FamilyId::R, FamilyId::qR}) {
    Family f = draw(id, 9, 13);
    ShapeInvarianceResidual r = shape_invariance_residual(f);
    CAPTURE(std::string(family_name(id)));
    CHECK(r.multiplicative < 1e-11);
    CHECK(r.additive < 1e-11);
  }
  for (FamilyId id : {FamilyId::MP, FamilyId::W, FamilyId::AW}) {
    Family f = draw(id, 0, 17);
    ShapeInvarianceResidual r = shape_invariance_residual_idqm(f);
    CAPTURE(std::string(family_name(id)));
    CHECK(r.multiplicative < 1e-12);
    CHECK(r.additive < 1e-12);
  }
  for (FamilyId id : {FamilyId::H, FamilyId::L, FamilyId::J}) {
    Family f = draw(id, 0, 19);
    CHECK(shape_invariance_residual_oqm(f) < 1e-11);
  }
}

TEST_CASE("ladder operators") {
  for (FamilyId id : {FamilyId::M, FamilyId::R, FamilyId::qR}) {
    Family f = (id == FamilyId::M) ? meixner_ref() : draw(id, 8, 23);
    OperatorSet os = build_operators(f);
    LadderOperators lo = ladder_operators(f, os);
    LadderReport rep = ladder_report(f, os, lo);
    CAPTURE(std::string(family_name(id)));
    CHECK(rep.hermiticity < 1e-11);
    CHECK(rep.raise_coeff < 1e-9);
    CHECK(rep.lower_coeff < 1e-9);
    CHECK(rep.commutation < 1e-10);
    CHECK(rep.number_op < 1e-9);
    CHECK(rep.offdiag < 1e-9);
    CHECK(rep.eta_tridiag < 1e-9);
    // a- annihilates the ground state
    std::vector<double> phi0(os.dim);
    for (int x = 0; x < os.dim; ++x) phi0[x] = std::sqrt(f.phi0_squared_lattice(x));
    std::vector<double> low = lo.a_minus * phi0;
    double w = 0.0, s = 0.0;
    for (int x = 0; x < os.dim; ++x) {
      w = std::max(w, std::abs(low[x]));
      s = std::max(s, std::abs(phi0[x]));
    }
    CHECK(w < 1e-10 * s * max_abs(lo.a_minus));
  }
}

TEST_CASE("Heisenberg picture") {
  Family m = meixner_ref();
  OperatorSet osm = build_operators(m);
  CHECK(heisenberg_residual(m, osm, {0.0}) < 1e-13);
  CHECK(heisenberg_residual(m, osm, {0.5}) < 1e-9);
  Family q = draw(FamilyId::qR, 6, 29);
  OperatorSet osq = build_operators(q);
  CHECK(heisenberg_residual(q, osq, {0.1, 1.0}) < 1e-8);
  Family r = draw(FamilyId::R, 8, 31);
  OperatorSet osr = build_operators(r);
  CHECK(heisenberg_residual(r, osr, {0.1, 0.5, 1.0}) < 1e-8);
}
