#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "dqm/errors.hpp"
#include "dqm/family.hpp"

namespace dqm {

enum class DomainKind { full_line, half_line, interval };
enum class DecayProfile { gaussian, gamma_tail, bounded };

struct IntegrationDomain {
  DomainKind kind = DomainKind::interval;
  double a = 0.0;  // left endpoint (half_line, interval)
  double b = 1.0;  // right endpoint (interval)
  DecayProfile decay = DecayProfile::bounded;
  double radius = 0.0;  // truncation radius for infinite domains; 0 = profile default
};

inline IntegrationDomain family_domain(const Family& fam) {
  switch (fam.id()) {
    case FamilyId::H: return {DomainKind::full_line, 0.0, 0.0, DecayProfile::gaussian, 0.0};
    case FamilyId::L: return {DomainKind::half_line, 0.0, 0.0, DecayProfile::gaussian, 0.0};
    case FamilyId::J: return {DomainKind::interval, 0.0, 1.5707963267948966, DecayProfile::bounded, 0.0};
    case FamilyId::MP: return {DomainKind::full_line, 0.0, 0.0, DecayProfile::gamma_tail, 0.0};
    case FamilyId::W: return {DomainKind::half_line, 0.0, 0.0, DecayProfile::gamma_tail, 0.0};
    case FamilyId::AW: return {DomainKind::interval, 0.0, 3.14159265358979323846, DecayProfile::bounded, 0.0};
    default: throw domain_error("no continuous domain for rdQM families");
  }
}

namespace detail {

inline double default_radius(DecayProfile p) {
  switch (p) {
    case DecayProfile::gaussian: return 12.0;
    case DecayProfile::gamma_tail: return 60.0;
    default: return 0.0;
  }
}

// One double-exponential pass at step h; the transform maps t in (-tmax,tmax).
// Returns the integral estimate and the L1 mass (the natural error scale for
// cancelling integrands).
template <class Map>
std::pair<double, double> de_sum(const std::function<double(double)>& f, const Map& map, double h,
                                 double tmax) {
  double s = 0.0, a = 0.0;
  int kmax = int(tmax / h);
  for (int k = -kmax; k <= kmax; ++k) {
    double x, w;
    if (!map(k * h, &x, &w)) continue;
    double v = f(x);
    if (std::isfinite(v)) {
      s += w * v;
      a += std::abs(w * v);
    }
  }
  return {s * h, a * h};
}

template <class Map>
double de_integrate(const std::function<double(double)>& f, const Map& map, double tol_rel,
                    double tol_abs) {
  const double tmax = 4.0;
  double prev = de_sum(f, map, 0.5, tmax).first;
  for (int level = 1; level <= 12; ++level) {
    double h = 0.5 / double(1 << level);
    auto [cur, mass] = de_sum(f, map, h, tmax);
    if (std::abs(cur - prev) <= tol_abs + tol_rel * std::max(std::abs(cur), mass) && level >= 3)
      return cur;
    prev = cur;
  }
  throw convergence_error("double-exponential quadrature did not settle");
}

}  // namespace detail

// Adaptive integral of f over the domain; infinite tails truncated at the
// decay-profile radius (scaled by radius if set).
inline double integrate(const std::function<double(double)>& f, const IntegrationDomain& dom,
                        double tol_rel = 1e-13, double tol_abs = 1e-300) {
  const double pih = 1.5707963267948966;
  double radius = dom.radius > 0.0 ? dom.radius : detail::default_radius(dom.decay);
  switch (dom.kind) {
    case DomainKind::interval: {
      double c = 0.5 * (dom.a + dom.b), r = 0.5 * (dom.b - dom.a);
      auto map = [&](double t, double* x, double* w) {
        double u = pih * std::sinh(t);
        double ch = std::cosh(u);
        *x = c + r * std::tanh(u);
        *w = r * pih * std::cosh(t) / (ch * ch);
        return std::abs(*x - dom.a) > 0.0 && std::abs(*x - dom.b) > 0.0;
      };
      return detail::de_integrate(f, map, tol_rel, tol_abs);
    }
    case DomainKind::half_line: {
      auto map = [&](double t, double* x, double* w) {
        double u = pih * std::sinh(t);
        double e = std::exp(u);
        *x = dom.a + e;
        *w = pih * std::cosh(t) * e;
        return e <= radius && e > 0.0;
      };
      return detail::de_integrate(f, map, tol_rel, tol_abs);
    }
    case DomainKind::full_line: {
      auto map = [&](double t, double* x, double* w) {
        double u = pih * std::sinh(t);
        *x = std::sinh(u);
        *w = pih * std::cosh(t) * std::cosh(u);
        return std::abs(*x) <= radius;
      };
      return detail::de_integrate(f, map, tol_rel, tol_abs);
    }
  }
  return 0.0;
}

// (f, g) with respect to a positive weight; absolute target tol relative to
// the weight scale is the caller's business, we expose both knobs.
inline double weighted_inner_product(const std::function<double(double)>& weight,
                                     const std::function<double(double)>& f,
                                     const std::function<double(double)>& g,
                                     const IntegrationDomain& dom, double tol_rel = 1e-13,
                                     double tol_abs = 1e-300) {
  return integrate([&](double x) { return weight(x) * f(x) * g(x); }, dom, tol_rel, tol_abs);
}

}  // namespace dqm
