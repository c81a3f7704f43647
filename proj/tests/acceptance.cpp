// Acceptance gate: one criterion per line, every tolerance pinned in code.
#include <cstdio>
#include <string>

#include "dqm/verify.hpp"

using namespace dqm;

namespace {

struct Criterion {
  int number;
  const char* name;
  const char* suite;
};

const Criterion kCriteria[] = {
    {1, "spectral solvability (dense spectra vs closed-form energies)", "spectral"},
    {2, "orthogonality (lattice Gram and quadrature norms)", "orthogonality"},
    {3, "duality and completeness", "duality"},
    {4, "shape invariance and the Rodrigues ladder", "shape"},
    {5, "closure, ladder operators, Heisenberg evolution", "closure"},
    {6, "Crum / Krein-Adler deletions", "crum"},
    {7, "unified potential construction and QES", "unified"},
    {8, "exceptional families", "exceptional"},
    {9, "idQM pointwise identities", "idqm"},
    {10, "negative controls", "negative"},
};

}  // namespace

int main() {
  VerifyOptions opts;
  opts.seed = 7;
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    Report rep;
    try {
      rep = run_suites(c.suite, opts).front();
    } catch (const std::exception& e) {
      std::printf("[FAIL] %2d. %s: exception: %s\n", c.number, c.name, e.what());
      ++failures;
      continue;
    }
    double worst_margin = 0.0;
    const CheckRecord* worst = nullptr;
    int bad = 0;
    for (const CheckRecord& r : rep.checks) {
      if (!r.pass) ++bad;
      double margin = r.tolerance > 0.0 ? r.residual / r.tolerance : (r.pass ? 0.0 : 1.0);
      if (!worst || margin > worst_margin) {
        worst_margin = margin;
        worst = &r;
      }
    }
    if (bad == 0) {
      std::printf("[PASS] %2d. %s  (%zu checks; tightest margin %.2e at %s)\n", c.number, c.name,
                  rep.checks.size(), worst_margin, worst ? worst->id.c_str() : "-");
    } else {
      std::printf("[FAIL] %2d. %s  (%d of %zu checks failed", c.number, c.name, bad,
                  rep.checks.size());
      for (const CheckRecord& r : rep.checks)
        if (!r.pass)
          std::printf("; %s residual %.3e > tol %.1e", r.id.c_str(), r.residual, r.tolerance);
      std::printf(")\n");
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
