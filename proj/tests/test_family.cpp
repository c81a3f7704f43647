#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dqm/family.hpp"
#include "dqm/random.hpp"

using namespace dqm;

namespace {

const FamilyId all_ids[] = {FamilyId::H,  FamilyId::L, FamilyId::J,
                            FamilyId::MP, FamilyId::W, FamilyId::AW,
                            FamilyId::M,  FamilyId::R, FamilyId::qR};

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

TEST_CASE("make_family reference values") {
  Family m = meixner_ref();
  CHECK(m.B(0.0) == doctest::Approx(2.0));
  CHECK(m.B(3.0) == doctest::Approx(5.0));   // B(x) = x + 2
  CHECK(m.D(3.0) == doctest::Approx(6.0));   // D(x) = 2x
  CHECK(m.energy(5) == doctest::Approx(5.0));

  Family h = Family::make(FamilyId::H, {});
  CHECK(h.U(1.3) == doctest::Approx(1.3 * 1.3 - 1.0));
  CHECK(h.eta(0.7) == doctest::Approx(0.7));
  CHECK(h.energy(4) == doctest::Approx(8.0));

  ParameterVector bad;
  bad.N = 4;
  bad.q_base = 0.6;
  bad.values["d"] = 0.5;
  bad.values["b"] = 10.0;  // ab = q^{-4} * 10 >> d
  bad.values["c"] = 0.8;
  CHECK_THROWS_AS(Family::make(FamilyId::qR, bad), parameter_error);
}

TEST_CASE("groundstate weight, Meixner") {
  Family m = meixner_ref();
  CHECK(m.phi0_squared_lattice(0) == doctest::Approx(1.0));
  CHECK(m.phi0_squared_lattice(1) == doctest::Approx(1.0));
  CHECK(m.phi0_squared_lattice(2) == doctest::Approx(0.75));
  CHECK_THROWS_AS(m.phi0_squared(1.3), domain_error);
}

TEST_CASE("rdQM closed-form weights match the product form") {
  for (FamilyId id : {FamilyId::M, FamilyId::R, FamilyId::qR}) {
    Family f = draw(id, 8, 11);
    int xmax = f.finite() ? f.N() : 20;
    for (int x = 0; x <= xmax; ++x) {
      double prod = f.phi0_squared_lattice(x);
      double closed;
      if (id == FamilyId::M) {
        double beta = f.par("beta"), c = f.par("c");
        closed = pochhammer(beta, x) * std::pow(c, x) / std::tgamma(double(x) + 1.0);
      } else if (id == FamilyId::R) {
        double a = -double(f.N()), b = f.par("b"), c = f.par("c"), d = f.par("d");
        closed = pochhammer(a, x) * pochhammer(b, x) * pochhammer(c, x) * pochhammer(d, x) /
                 (pochhammer(1.0 + d - a, x) * pochhammer(1.0 + d - b, x) *
                  pochhammer(1.0 + d - c, x) * pochhammer(1.0, x)) *
                 (2.0 * x + d) / d;
      } else {
        double q = f.q(), b = f.par("b"), c = f.par("c"), d = f.par("d");
        double a = std::pow(q, -double(f.N()));
        double dt = f.dtilde();
        closed = q_pochhammer(a, q, x) * q_pochhammer(b, q, x) * q_pochhammer(c, q, x) *
                 q_pochhammer(d, q, x) /
                 (q_pochhammer(d * q / a, q, x) * q_pochhammer(d * q / b, q, x) *
                  q_pochhammer(d * q / c, q, x) * q_pochhammer(q, q, x) * std::pow(dt, x)) *
                 (1.0 - d * q * q * std::pow(q, 2 * (x - 1) + 0.0)) / (1.0 - d);
        closed = q_pochhammer(a, q, x) * q_pochhammer(b, q, x) * q_pochhammer(c, q, x) *
                 q_pochhammer(d, q, x) /
                 (q_pochhammer(d * q / a, q, x) * q_pochhammer(d * q / b, q, x) *
                  q_pochhammer(d * q / c, q, x) * q_pochhammer(q, q, x) * std::pow(dt, x)) *
                 (1.0 - d * std::pow(q, 2 * x)) / (1.0 - d);
      }
      CHECK(std::abs(prod - closed) / std::max(std::abs(closed), 1e-30) < 1e-11);
      CHECK(prod > 0.0);
    }
  }
}

TEST_CASE("norm constants") {
  Family h = Family::make(FamilyId::H, {});
  double rpi = std::sqrt(3.14159265358979323846);
  CHECK(h.norm_constant(0) == doctest::Approx(rpi));
  CHECK(h.norm_constant(3) == doctest::Approx(48.0 * rpi));
  Family m = meixner_ref();
  CHECK(m.norm_constant(0) == doctest::Approx(0.25));  // (1-c)^beta
  CHECK_THROWS_AS(m.norm_constant(-1), index_error);
}

TEST_CASE("energies: E(n) = f_n b_{n-1} and the shape-invariance sum") {
  for (FamilyId id : all_ids) {
    Family f = draw(id, 24, 5);
    int nmax = f.finite() ? std::min(20, f.N()) : 20;
    for (int n = 1; n <= nmax; ++n) {
      CHECK(std::abs(f.energy(n) - f.f_coeff(n) * f.b_coeff(n)) <=
            1e-12 * std::max(1.0, std::abs(f.energy(n))));
      // E(n; lambda) = sum_s kappa^s E(1; lambda+s delta)
      double acc = 0.0, kp = 1.0;
      for (int s = 0; s < n; ++s) {
        acc += kp * f.shifted(s).energy(1);
        kp *= f.kappa();
      }
      CHECK(std::abs(acc - f.energy(n)) <= 1e-12 * std::max(1.0, std::abs(f.energy(n))));
    }
  }
}

TEST_CASE("alpha consistency across the catalog") {
  for (FamilyId id : all_ids) {
    Family f = draw(id, 12, 7);
    int nmax = f.finite() ? f.N() : 16;
    AlphaReport rep = alpha_consistency(f, nmax);
    CAPTURE(family_name(id));
    CHECK(rep.max_residual_plus < 1e-10);
    CHECK(rep.max_residual_minus < 1e-10);
    CHECK(rep.min_discriminant >= 0.0);
  }
  Family h = Family::make(FamilyId::H, {});
  AlphaReport rep = alpha_consistency(h, 10);
  CHECK(rep.max_residual_plus == 0.0);
  CHECK(rep.max_residual_minus == 0.0);
}

TEST_CASE("eta monotone, eta(0) = 0 for dQM, positivity of B/D") {
  for (FamilyId id : {FamilyId::MP, FamilyId::W, FamilyId::AW, FamilyId::M, FamilyId::R, FamilyId::qR}) {
    Family f = draw(id, 9, 3);
    CHECK(std::abs(f.eta(0.0)) < 1e-14);
    double prev = f.eta(0.0);
    for (int k = 1; k <= 20; ++k) {
      double x = (f.id() == FamilyId::AW || f.id() == FamilyId::J) ? 3.0 * k / 21.0 : double(k) * 0.45;
      if (category_of(id) == Category::rdQM) x = double(k) * (f.finite() ? f.N() / 20.0 : 0.5);
      double e = f.eta(x);
      CHECK(e > prev - 1e-14);
      prev = e;
    }
    if (category_of(id) == Category::rdQM) {
      int xmax = f.finite() ? f.N() : 25;
      for (int x = 0; x < xmax; ++x) {
        CHECK(f.B(double(x)) > 0.0);
        CHECK(f.D(double(x + 1)) > 0.0);
      }
      CHECK(f.D(0.0) == 0.0);
      if (f.finite()) CHECK(f.B(double(f.N())) == 0.0);
    }
  }
}

TEST_CASE("eta for R/qR tracks the shifted parameters") {
  Family r = draw(FamilyId::R, 8, 19);
  Family r1 = r.shifted(1);
  // d moves by 1, so eta differs
  CHECK(r1.eta(2.0) == doctest::Approx(2.0 * (2.0 + r.par("d") + 1.0)));
  CHECK(r.eta(2.0) != doctest::Approx(r1.eta(2.0)));
}

TEST_CASE("truncation point of the infinite Meixner lattice") {
  Family m = meixner_ref();
  int xt = m.truncation();
  CHECK(xt > 20);
  CHECK(xt < 200);
  double mx = 0.0;
  for (int x = 0; x <= xt; ++x) mx = std::max(mx, m.phi0_squared_lattice(x));
  CHECK(m.phi0_squared_lattice(xt) < 1e-15 * mx);
}

TEST_CASE("idQM weights positive and finite") {
  for (FamilyId id : {FamilyId::MP, FamilyId::W, FamilyId::AW}) {
    Family f = draw(id, 0, 23);
    for (double x : {0.25, 0.8, 1.9}) {
      double w = f.phi0_squared(x);
      CHECK(std::isfinite(w));
      CHECK(w > 0.0);
    }
  }
}
