#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dqm/family.hpp"
#include "dqm/lattice.hpp"
#include "dqm/linalg.hpp"

namespace dqm {

// Krein-Adler validity: prod_j (m - d_j) >= 0 for every integer m >= 0
inline bool deletion_valid(const std::vector<int>& del, std::string* why = nullptr) {
  if (del.empty()) return true;
  int top = *std::max_element(del.begin(), del.end());
  for (int m = 0; m <= top + 1; ++m) {
    double p = 1.0;
    for (int d : del) p *= double(m - d);
    if (p < 0.0) {
      if (why) *why = "product (m - d_j) negative at m = " + std::to_string(m);
      return false;
    }
  }
  return true;
}

struct DeletionSet {
  std::vector<int> indices;  // strictly increasing

  static DeletionSet make(std::vector<int> idx) {
    std::sort(idx.begin(), idx.end());
    for (size_t i = 0; i + 1 < idx.size(); ++i)
      if (idx[i] == idx[i + 1]) throw validity_error("deletion indices must be distinct");
    if (!idx.empty() && idx.front() < 0) throw validity_error("deletion indices must be >= 0");
    std::string why;
    if (!deletion_valid(idx, &why)) throw validity_error(why);
    DeletionSet d;
    d.indices = std::move(idx);
    return d;
  }
  int ell() const { return int(indices.size()); }
  int mu() const {
    int m = 0;
    while (std::find(indices.begin(), indices.end(), m) != indices.end()) ++m;
    return m;
  }
};

// W_C[f_1,...,f_m](x) = det(f_k(x + j - 1)), j, k = 1..m
template <class T>
T casoratian_t(const std::vector<std::vector<T>>& fs, int x, double* cond = nullptr) {
  const int m = int(fs.size());
  Mat<T> a(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) a(j, k) = fs[k][x + j];
  auto det = lu_determinant(a);
  if (cond) *cond = det.condition_estimate;
  return det.value;
}

inline double casoratian(const std::vector<std::vector<double>>& fs, int x) {
  return casoratian_t(fs, x);
}

inline double sqrt_like(double x) { return std::sqrt(x); }
inline DDouble sqrt_like(const DDouble& x) { return sqrt(x); }

// A finite chunk of eigenfunction values phi_n(x) = phi0(x) P_n(eta(x)),
// unnormalized, on x = 0..len-1.
template <class T>
std::vector<T> eigenfunction_values(const Family& fam, int n, int len) {
  std::vector<T> v(len);
  for (int x = 0; x < len; ++x)
    v[x] = sqrt_like(fam.phi0_squared_lattice_t<T>(x)) * fam.P_lattice_t<T>(n, T(double(x)));
  return v;
}

struct DeletedSystem {
  FamilyId base_id;
  std::vector<int> deleted;
  int mu = 0;
  int dim = 0;                    // reduced lattice size
  std::vector<double> Bbar, Dbar;
  std::vector<int> surviving;     // level labels of the reduced spectrum
  bool extended_precision = false;
  double min_potential = 0.0;     // min of Bbar (interior) and Dbar (x >= 1)
};

namespace detail {

template <class T>
bool krein_adler_t(const Family& fam, const DeletionSet& del, DeletedSystem* out,
                   double cond_limit = 1e10) {
  const int ell = del.ell();
  const int mu = del.mu();
  int full = fam.finite() ? fam.N() + 1 : gram_extent(fam, *std::max_element(del.indices.begin(),
                                                                             del.indices.end()) +
                                                              reliable_modes(fam)) +
                                              12;
  int dim = full - ell;  // reduced lattice 0..dim-1
  std::vector<std::vector<T>> fs;
  for (int d : del.indices) fs.push_back(eigenfunction_values<T>(fam, d, full + 2));
  std::vector<std::vector<T>> fsm = fs;
  fsm.push_back(eigenfunction_values<T>(fam, mu, full + 2));

  // needed Casoratians: W[phi_D](x) for x <= dim, W[phi_D, phi_mu](x) for
  // x <= dim-1 (the x = dim value would multiply B(N) = 0)
  std::vector<T> w(dim + 1), wm(dim);
  bool ok = true;
  for (int x = 0; x <= dim && ok; ++x) {
    double c1, c2;
    w[x] = casoratian_t(fs, x, &c1);
    if (c1 > cond_limit) ok = false;
    if (x <= dim - 1) {
      wm[x] = casoratian_t(fsm, x, &c2);
      if (c2 > cond_limit) ok = false;
    }
  }
  if (!ok) return false;
  for (int x = 0; x <= dim; ++x)
    if (to_double(w[x]) == 0.0 || (x <= dim - 1 && to_double(wm[x]) == 0.0))
      throw singularity_error("Casoratian vanishes on the lattice");

  out->base_id = fam.id();
  out->deleted = del.indices;
  out->mu = mu;
  out->dim = dim;
  out->Bbar.assign(dim, 0.0);
  out->Dbar.assign(dim, 0.0);
  for (int x = 0; x < dim; ++x) {
    if (fam.finite() && x == dim - 1) {
      out->Bbar[x] = 0.0;  // carries the B(N) = 0 factor
    } else {
      double bfac = fam.B(double(x + ell)) * fam.D(double(x + ell + 1));
      T bb = T(std::sqrt(std::max(0.0, bfac))) * (w[x] / w[x + 1]) * (wm[x + 1] / wm[x]);
      out->Bbar[x] = to_double(bb);
    }
    if (x == 0) {
      out->Dbar[x] = 0.0;  // D(0) = 0
    } else {
      double dfac = fam.B(double(x - 1)) * fam.D(double(x));
      T dd = T(std::sqrt(std::max(0.0, dfac))) * (w[x + 1] / w[x]) * (wm[x - 1] / wm[x]);
      out->Dbar[x] = to_double(dd);
    }
  }
  out->surviving.clear();
  for (int n = 0; out->surviving.size() < size_t(dim); ++n)
    if (std::find(del.indices.begin(), del.indices.end(), n) == del.indices.end())
      out->surviving.push_back(n);
  out->min_potential = 1e300;
  for (int x = 0; x + 1 < dim; ++x) out->min_potential = std::min(out->min_potential, out->Bbar[x]);
  for (int x = 1; x < dim; ++x) out->min_potential = std::min(out->min_potential, out->Dbar[x]);
  return true;
}

}  // namespace detail

// Krein-Adler deletion; escalates to extended precision when the Casoratian
// LU pivots look ill-conditioned.
inline DeletedSystem krein_adler(const Family& fam, const DeletionSet& del) {
  if (fam.category() != Category::rdQM) throw domain_error("Krein-Adler chain is rdQM here");
  DeletedSystem sys;
  if (detail::krein_adler_t<double>(fam, del, &sys)) return sys;
  sys.extended_precision = true;
  if (!detail::krein_adler_t<DDouble>(fam, del, &sys, 1e28))
    throw singularity_error("Casoratian conditioning beyond the extended-precision range");
  sys.extended_precision = true;
  return sys;
}

inline DeletedSystem crum_chain(const Family& fam, int s) {
  if (s < 1) throw parameter_error("crum chain needs s >= 1");
  if (fam.finite() && s > fam.N()) throw parameter_error("cannot delete more levels than exist");
  std::vector<int> idx(s);
  for (int k = 0; k < s; ++k) idx[k] = k;
  return krein_adler(fam, DeletionSet::make(idx));
}

// Deleted-system eigenfunction phi-bar_n (unnormalized), per the determinant
// formula with the F(x) prefactor.
inline std::vector<double> deleted_eigenfunction(const Family& fam, const DeletedSystem& sys,
                                                 int n) {
  const int ell = int(sys.deleted.size());
  int full = sys.dim + ell;
  std::vector<std::vector<double>> fs;
  for (int d : sys.deleted) fs.push_back(eigenfunction_values<double>(fam, d, full + 2));
  std::vector<std::vector<double>> fsn = fs;
  fsn.push_back(eigenfunction_values<double>(fam, n, full + 2));
  std::vector<double> out(sys.dim);
  double sgn = (ell % 2) ? -1.0 : 1.0;
  for (int x = 0; x < sys.dim; ++x) {
    double prod = 1.0;
    for (int k = 1; k <= ell; ++k) prod *= fam.B(double(x + k - 1)) * fam.D(double(x + k));
    double w0 = casoratian(fs, x), w1 = casoratian(fs, x + 1);
    double f = std::sqrt(std::abs(prod)) / (w0 * w1);
    // F must be positive under a valid deletion; carry its sign explicitly
    double root = (f < 0.0 ? -1.0 : 1.0) * std::sqrt(std::abs(f));
    out[x] = sgn * root * casoratian(fsn, x);
  }
  return out;
}

struct NormIdentityReport {
  double max_residual = 0.0;
  bool all_positive = true;
};

// (phi-bar_n, phi-bar_n) = prod_j (E(n) - E(d_j)) (phi_n, phi_n)
inline NormIdentityReport norm_identity_check(const Family& fam, const DeletedSystem& sys,
                                              int n_levels = -1) {
  NormIdentityReport rep;
  if (n_levels < 0) n_levels = std::min<int>(6, int(sys.surviving.size()));
  const int ell = int(sys.deleted.size());
  int full = sys.dim + ell;
  for (int i = 0; i < n_levels; ++i) {
    int n = sys.surviving[i];
    std::vector<double> pb = deleted_eigenfunction(fam, sys, n);
    double lhs = 0.0;
    for (double v : pb) lhs += v * v;
    auto phin = eigenfunction_values<double>(fam, n, full + 2);
    double base = 0.0;
    for (int x = 0; x < full; ++x) base += phin[x] * phin[x];
    double prod = 1.0;
    for (int d : sys.deleted) prod *= fam.energy(n) - fam.energy(d);
    double rhs = prod * base;
    if (lhs <= 0.0) rep.all_positive = false;
    rep.max_residual =
        std::max(rep.max_residual, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
  return rep;
}

// spectrum of the rebuilt Hamiltonian (shifted by E(mu)) vs surviving E(n)
inline double deleted_spectrum_residual(const Family& fam, const DeletedSystem& sys) {
  JacobiMatrix m = matrix_from_bd(sys.Bbar, sys.Dbar);
  SpectralDecomposition sd = eigendecompose(m);
  double emu = fam.energy(sys.mu);
  int n_check = fam.finite() ? sys.dim : std::min<int>(sys.dim, reliable_modes(fam) - int(sys.deleted.size()));
  double gap = fam.energy(sys.surviving[1]) - fam.energy(sys.surviving[0]);
  double worst = 0.0;
  for (int i = 0; i < n_check; ++i) {
    double lam = sd.eigenvalues[i] + emu;
    double en = fam.energy(sys.surviving[i]);
    worst = std::max(worst, std::abs(lam - en) / std::max(std::abs(en), gap));
  }
  return worst;
}

// The two determinant product forms of the s-step Crum eigenfunctions (via
// B^[k] and via D^[k]) must agree; returns their max pointwise deviation.
inline double crum_two_forms_residual(const Family& fam, int s, int n) {
  int full = fam.finite() ? fam.N() + 1 : gram_extent(fam, s + n + 2) + 10;
  // step potentials B^[k], D^[k] built from the step ground states
  std::vector<std::vector<double>> phis;  // phi_0..phi_{s-1}, then phi_n
  for (int j = 0; j < s; ++j) phis.push_back(eigenfunction_values<double>(fam, j, full + 2));
  phis.push_back(eigenfunction_values<double>(fam, n, full + 2));
  auto wc = [&](int upto, bool with_n, int x) {
    std::vector<std::vector<double>> fs(phis.begin(), phis.begin() + upto);
    if (with_n) fs.push_back(phis.back());
    return casoratian(fs, x);
  };
  // B^[k](x), D^[k](x) per the step recursion; k = 0 is the original family
  std::vector<std::vector<double>> bk(s), dk(s);
  for (int k = 0; k < s; ++k) {
    bk[k].assign(full, 0.0);
    dk[k].assign(full, 0.0);
  }
  for (int x = 0; x < full; ++x) {
    bk[0][x] = fam.B(double(x));
    if (fam.finite() && x == fam.N()) bk[0][x] = 0.0;
    dk[0][x] = fam.D(double(x));
  }
  for (int k = 1; k < s; ++k) {
    // phi_k^[k](x) = (-1)^k prod_{j<k} sqrt(B^[j](x)) W[phi_0..phi_k](x)/W[phi_0..phi_{k-1}](x+1)
    auto phikk = [&](int x) {
      double p = 1.0;
      for (int j = 0; j < k; ++j) p *= std::sqrt(std::max(0.0, bk[j][x]));
      std::vector<std::vector<double>> fs(phis.begin(), phis.begin() + k);
      fs.push_back(phis[k]);
      double num = casoratian(fs, x);
      fs.pop_back();
      double den = casoratian(fs, x + 1);
      return ((k % 2) ? -1.0 : 1.0) * p * num / den;
    };
    for (int x = 0; x + 1 < full; ++x) {
      bk[k][x] = std::sqrt(bk[k - 1][x + 1] * dk[k - 1][x + 1]) * phikk(x + 1) / phikk(x);
      dk[k][x] = (x == 0) ? 0.0
                          : std::sqrt(bk[k - 1][x] * dk[k - 1][x]) * phikk(x - 1) / phikk(x);
    }
  }
  double worst = 0.0, scale = 0.0;
  int xmax = full - s - 2;
  for (int x = 0; x < xmax; ++x) {
    double pb = 1.0, pd = 1.0;
    for (int k = 0; k < s; ++k) {
      pb *= std::sqrt(std::max(0.0, bk[k][x]));
      pd *= std::sqrt(std::max(0.0, dk[k][x + s - k]));
    }
    double sgn = (s % 2) ? -1.0 : 1.0;
    double form_b = sgn * pb * wc(s, true, x) / wc(s, false, x + 1);
    double form_d = sgn * pd * wc(s, true, x) / wc(s, false, x);
    scale = std::max({scale, std::abs(form_b), std::abs(form_d)});
    worst = std::max(worst, std::abs(form_b - form_d));
  }
  return worst / std::max(scale, 1e-300);
}

}  // namespace dqm
