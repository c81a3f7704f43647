#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dqm/lattice.hpp"
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

TEST_CASE("Hamiltonian assembly for Meixner") {
  Family m = meixner_ref();
  JacobiMatrix h = build_hamiltonian(m);
  // box extends past the weight-rule truncation so reported modes die off
  CHECK(h.dim > m.truncation());
  for (int x = 0; x < 5; ++x) {
    CHECK(h.diag[x] == doctest::Approx(3.0 * x + 2.0));
    CHECK(h.off[x] == doctest::Approx(-std::sqrt((x + 2.0) * 2.0 * (x + 1.0))));
  }
  // H phi0 = 0
  std::vector<double> phi(h.dim);
  for (int x = 0; x < h.dim; ++x) phi[x] = std::sqrt(m.phi0_squared_lattice(x));
  double worst = 0.0;
  for (int x = 0; x < h.dim; ++x) {
    double v = h.diag[x] * phi[x];
    if (x > 0) v += h.off[x - 1] * phi[x - 1];
    if (x + 1 < h.dim) v += h.off[x] * phi[x + 1];
    worst = std::max(worst, std::abs(v));
  }
  CHECK(worst < 1e-12 * h.diag[h.dim - 1]);
}

TEST_CASE("eigendecompose basics") {
  JacobiMatrix one;
  one.dim = 1;
  one.diag = {0.0};
  SpectralDecomposition sd = eigendecompose(one);
  CHECK(sd.eigenvalues[0] == 0.0);

  Family r1 = draw(FamilyId::R, 1, 5);
  JacobiMatrix h = build_hamiltonian(r1);
  SpectralDecomposition s2 = eigendecompose(h);
  // dense 2x2 oracle
  double a = h.diag[0], b = h.diag[1], c = h.off[0];
  double tr = a + b, disc = std::sqrt((a - b) * (a - b) + 4.0 * c * c);
  CHECK(s2.eigenvalues[0] == doctest::Approx(0.5 * (tr - disc)).epsilon(1e-13));
  CHECK(s2.eigenvalues[1] == doctest::Approx(0.5 * (tr + disc)).epsilon(1e-13));
  CHECK(std::abs(s2.eigenvalues[0]) < 1e-13 * tr);
  CHECK(s2.eigenvalues[1] == doctest::Approx(r1.energy(1)));
}

TEST_CASE("spectra match closed-form energies") {
  for (uint64_t seed : {11u, 12u, 13u}) {
    for (FamilyId id : {FamilyId::R, FamilyId::qR}) {
      Family f = draw(id, 10, seed);
      SpectralDecomposition sd = eigendecompose(build_hamiltonian(f));
      CAPTURE(std::string(family_name(id)));
      CHECK(spectrum_residual(f, sd) < 1e-10);
      CHECK(sd.eigenvalues.front() > -1e-10 * sd.eigenvalues.back());
      for (size_t n = 1; n < sd.eigenvalues.size(); ++n)
        CHECK(sd.eigenvalues[n] - sd.eigenvalues[n - 1] > 1e-12);
      CHECK(eigenvector_residual(f, sd) < 1e-9);
    }
  }
  Family m = meixner_ref();
  SpectralDecomposition sd = eigendecompose(build_hamiltonian(m));
  CHECK(spectrum_residual(m, sd) < 1e-8);
  CHECK(eigenvector_residual(m, sd) < 1e-9);
}

TEST_CASE("dual polynomials") {
  Family m = meixner_ref();
  CHECK(dual_polynomial(m, 0, 17.3) == 1.0);
  for (int x : {1, 3, 7}) CHECK(dual_polynomial(m, x, 0.0) == doctest::Approx(1.0));
  CHECK(dual_polynomial(m, 1, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("duality and completeness") {
  Family m = meixner_ref();
  DualityReport dm = duality_check(m, 8);
  CHECK(dm.duality_max < 1e-10);
  CHECK(dm.completeness_max < 1e-9);
  for (FamilyId id : {FamilyId::R, FamilyId::qR}) {
    Family f = draw(id, 8, 31);
    DualityReport d = duality_check(f);
    CAPTURE(std::string(family_name(id)));
    CHECK(d.duality_max < 1e-10);
    CHECK(d.completeness_max < 1e-9);
  }
}

TEST_CASE("orthogonality with closed-form norms") {
  Family m = meixner_ref();
  // 1 x 1 block: sum of weights equals 1/d_0^2
  double s = 0.0;
  for (int x = 0; x <= m.truncation(); ++x) s += m.phi0_squared_lattice(x);
  CHECK(s * m.norm_constant(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(orthogonality_residual(m) < 1e-8);
  Family r = draw(FamilyId::R, 8, 17);
  CHECK(orthogonality_residual(r) < 1e-11);
  Family q = draw(FamilyId::qR, 8, 18);
  CHECK(orthogonality_residual(q) < 1e-10);
}

TEST_CASE("characteristic equation roots") {
  for (FamilyId id : {FamilyId::R, FamilyId::qR}) {
    Family f = draw(id, 5, 23);
    CAPTURE(std::string(family_name(id)));
    CHECK(characteristic_equation_residual(f) < 1e-9);
  }
}

TEST_CASE("H-tilde lower triangularity on the eta powers") {
  for (FamilyId id : {FamilyId::M, FamilyId::R, FamilyId::qR}) {
    Family f = draw(id, 9, 41);
    TriangularityReport rep = htilde_triangularity(f, 6);
    CAPTURE(std::string(family_name(id)));
    CHECK(rep.spurious_max < 1e-9);
    CHECK(rep.energy_max < 1e-9);
  }
}
