#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "dqm/family.hpp"
#include "dqm/quadrature.hpp"
#include "dqm/random.hpp"
#include "dqm/special.hpp"

using namespace dqm;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }
}

TEST_CASE("pochhammer basics") {
  CHECK(pochhammer(5.0, 0) == 1.0);
  CHECK(pochhammer(2.0, 3) == doctest::Approx(24.0));  // 2*3*4
  CHECK(pochhammer(-1.0, 3) == 0.0);
  // (a)_{n+1} = (a)_n (a+n)
  for (double a : {-2.5, 0.3, 4.0})
    for (int n : {0, 1, 4, 9})
      CHECK(pochhammer(a, n + 1) == doctest::Approx(pochhammer(a, n) * (a + n)));
}

TEST_CASE("q-pochhammer basics") {
  CHECK(q_pochhammer_checked(0.3, 0.5, 0) == 1.0);
  CHECK(q_pochhammer_checked(1.0, 0.5, 3) == 0.0);
  CHECK(q_pochhammer_checked(0.5, 0.5, 2) == doctest::Approx(0.375));
  CHECK_THROWS_AS(q_pochhammer_checked(0.5, 1.5, 2), parameter_error);
  for (double a : {-0.4, 0.2, 0.9})
    for (int n : {0, 2, 7})
      CHECK(q_pochhammer(a, 0.6, n + 1) ==
            doctest::Approx(q_pochhammer(a, 0.6, n) * (1.0 - a * std::pow(0.6, n))));
}

TEST_CASE("log_gamma") {
  CHECK(std::abs(log_gamma(cplx(1.0, 0.0))) < 1e-14);
  CHECK(log_gamma(cplx(0.5, 0.0)).real() == doctest::Approx(0.5 * std::log(3.14159265358979323846)));
  CHECK(log_gamma(cplx(3.0, 0.0)).real() == doctest::Approx(std::log(2.0)));
  // recurrence exp(lg(z+1)) = z exp(lg(z)) on a grid
  for (double re : {0.3, 1.7, 6.0})
    for (double im : {-3.0, 0.25, 11.0}) {
      cplx z(re, im);
      cplx lhs = std::exp(log_gamma(z + cplx(1.0, 0.0)));
      cplx rhs = z * std::exp(log_gamma(z));
      CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-12);
    }
  CHECK_THROWS_AS(log_gamma(cplx(-2.0, 0.0)), domain_error);
}

TEST_CASE("hypergeometric terminating") {
  // 2F1(-1,-1;2|-1) = 1 + 1*(-1)/2 = 0.5
  HypergeomSpec s;
  s.numerator_params = {cplx(-1.0, 0.0), cplx(-1.0, 0.0)};
  s.denominator_params = {cplx(2.0, 0.0)};
  s.argument = cplx(-1.0, 0.0);
  CHECK(hypergeometric(s).real() == doctest::Approx(0.5));

  // n = 0 terminates at the constant term
  s.numerator_params = {cplx(0.0, 0.0), cplx(-3.3, 0.0)};
  CHECK(hypergeometric(s).real() == doctest::Approx(1.0));

  // termination independent of max_terms
  s.numerator_params = {cplx(-4.0, 0.0), cplx(2.5, 0.0)};
  s.argument = cplx(0.7, 0.0);
  CHECK(hypergeometric(s, 10).real() == doctest::Approx(hypergeometric(s, 500).real()));

  // q-case with first numerator q^0 = 1 -> series is 1
  HypergeomSpec qs;
  qs.q_base = 0.5;
  qs.numerator_params = {cplx(1.0, 0.0), cplx(0.3, 0.0), cplx(0.2, 0.0), cplx(0.1, 0.0)};
  qs.denominator_params = {cplx(0.4, 0.0), cplx(0.5, 0.0), cplx(0.6, 0.0)};
  qs.argument = cplx(0.5, 0.0);
  CHECK(hypergeometric(qs).real() == doctest::Approx(1.0));

  // denominator pole before termination
  HypergeomSpec bad;
  bad.numerator_params = {cplx(-5.0, 0.0)};
  bad.denominator_params = {cplx(-2.0, 0.0)};
  bad.argument = cplx(0.3, 0.0);
  CHECK_THROWS_AS(hypergeometric(bad), domain_error);
}

TEST_CASE("hypergeometric non-terminating") {
  // 1F1(1;2;z) = (e^z - 1)/z
  HypergeomSpec s;
  s.numerator_params = {cplx(1.0, 0.0)};
  s.denominator_params = {cplx(2.0, 0.0)};
  s.argument = cplx(0.8, 0.0);
  CHECK(hypergeometric(s).real() == doctest::Approx((std::exp(0.8) - 1.0) / 0.8));
}

TEST_CASE("ddouble arithmetic") {
  DDouble a(1.0);
  DDouble third = a / DDouble(3.0);
  DDouble back = third * DDouble(3.0);
  CHECK(std::abs(to_double(back - DDouble(1.0))) < 1e-30);
  DDouble r = sqrt(DDouble(2.0));
  CHECK(std::abs(to_double(r * r - DDouble(2.0))) < 1e-30);
  CHECK(to_double(pow_int(DDouble(0.5), -3)) == doctest::Approx(8.0));
}

TEST_CASE("quadrature sanity") {
  IntegrationDomain full{DomainKind::full_line, 0, 0, DecayProfile::gaussian, 0.0};
  double v = integrate([](double x) { return std::exp(-x * x); }, full);
  CHECK(rel(v, std::sqrt(3.14159265358979323846)) < 1e-12);

  IntegrationDomain half{DomainKind::half_line, 0, 0, DecayProfile::gaussian, 0.0};
  double g = integrate([](double x) { return x * x * std::exp(-x * x); }, half);
  CHECK(rel(g, 0.25 * std::sqrt(3.14159265358979323846)) < 1e-12);

  IntegrationDomain iv{DomainKind::interval, 0.0, 1.5707963267948966, DecayProfile::bounded, 0.0};
  double j = integrate([](double x) { return std::pow(std::sin(x), 3.0) * std::pow(std::cos(x), 2.0); },
                       iv);
  CHECK(rel(j, 2.0 / 15.0) < 1e-12);

  // doubling the truncation radius is a no-op at tolerance
  IntegrationDomain full2 = full;
  full2.radius = 24.0;
  double v2 = integrate([](double x) { return std::exp(-x * x); }, full2);
  CHECK(std::abs(v - v2) < 1e-13);

  // odd integrand on a symmetric domain
  double odd = integrate([](double x) { return x * std::exp(-x * x); }, full);
  CHECK(std::abs(odd) < 1e-13);
}

TEST_CASE("q-binomial limit of the non-terminating basic series") {
  // 1phi0(a; -; q, z) = (a z; q)_inf / (z; q)_inf
  double q = 0.55, a = 0.3, z = 0.4;
  HypergeomSpec s;
  s.q_base = q;
  s.numerator_params = {cplx(a, 0.0)};
  s.argument = cplx(z, 0.0);
  cplx lhs = hypergeometric(s, 600, 1e-16);
  cplx rhs = q_pochhammer_inf(cplx(a * z, 0.0), q) / q_pochhammer_inf(cplx(z, 0.0), q);
  CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-13);
}

TEST_CASE("idQM norm constants against quadrature") {
  Rng rng(13);
  for (FamilyId id : {FamilyId::MP, FamilyId::W, FamilyId::AW}) {
    Family f = Family::make(id, draw_params(id, 0, rng));
    IntegrationDomain dom = family_domain(f);
    CAPTURE(family_name(id));
    for (int n = 0; n <= 3; ++n)
      for (int m = n; m <= 3; ++m) {
        double v = integrate([&](double x) { return f.phi0_squared(x) * f.P(n, x) * f.P(m, x); },
                             dom, 1e-11, 1e-11);
        double g = v / std::sqrt(f.norm_constant(n) * f.norm_constant(m));
        CHECK(std::abs(g - (n == m ? 1.0 : 0.0)) < 1e-8);
      }
  }
}
