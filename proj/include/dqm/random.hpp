#pragma once

#include <cstdint>

#include "dqm/family.hpp"

namespace dqm {

// splitmix64: tiny, deterministic, seedable; all stochastic draws in the
// library flow through this so reports can echo the seed.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform(double a, double b) {
    return a + (b - a) * (double(next() >> 11) * 0x1.0p-53);
  }
  int uniform_int(int a, int b) { return a + int(next() % uint64_t(b - a + 1)); }
};

// A validated parameter draw for one family; loops until the range
// inequalities hold (the documented ranges also imply lattice positivity).
inline ParameterVector draw_params(FamilyId id, int N, Rng& rng) {
  ParameterVector pv;
  for (int attempt = 0; attempt < 200; ++attempt) {
    pv = ParameterVector{};
    switch (id) {
      case FamilyId::H: break;
      case FamilyId::L: pv.values["g"] = rng.uniform(0.7, 3.0); break;
      case FamilyId::J:
        pv.values["g"] = rng.uniform(0.7, 3.0);
        pv.values["h"] = rng.uniform(0.7, 3.0);
        break;
      case FamilyId::MP: pv.values["a"] = rng.uniform(0.6, 2.5); break;
      case FamilyId::W: {
        double base = rng.uniform(0.5, 1.0);
        pv.values["a1"] = base;
        pv.values["a2"] = base + rng.uniform(0.05, 0.6);
        pv.values["a3"] = base + rng.uniform(0.6, 1.2);
        pv.values["a4"] = base + rng.uniform(1.2, 1.8);
        break;
      }
      case FamilyId::AW: {
        pv.q_base = rng.uniform(0.56, 0.78);
        pv.values["a1"] = rng.uniform(0.12, 0.35);
        pv.values["a2"] = rng.uniform(0.36, 0.55);
        pv.values["a3"] = rng.uniform(0.56, 0.72);
        pv.values["a4"] = rng.uniform(0.73, 0.9);
        break;
      }
      case FamilyId::M:
        pv.values["beta"] = rng.uniform(1.2, 4.0);
        pv.values["c"] = rng.uniform(0.25, 0.7);
        break;
      case FamilyId::R: {
        pv.N = N;
        double d = rng.uniform(0.4, 1.6);
        pv.values["d"] = d;
        pv.values["b"] = d + N + rng.uniform(0.4, 2.5);
        pv.values["c"] = rng.uniform(0.25, 0.9) * (1.0 + d);
        break;
      }
      case FamilyId::qR: {
        pv.N = N;
        double q = rng.uniform(0.58, 0.78);
        pv.q_base = q;
        double d = rng.uniform(0.35, 0.85);
        pv.values["d"] = d;
        pv.values["b"] = d * std::pow(q, N) * rng.uniform(0.15, 0.85);
        double lo = q * d;
        pv.values["c"] = lo + (1.0 - lo) * rng.uniform(0.15, 0.9);
        break;
      }
    }
    try {
      Family::make(id, pv);
      return pv;
    } catch (const parameter_error&) {
      continue;
    }
  }
  throw parameter_error("could not draw a valid parameter set");
}

}  // namespace dqm
