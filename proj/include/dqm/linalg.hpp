#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "dqm/ddouble.hpp"
#include "dqm/errors.hpp"

namespace dqm {

// Small dense row-major matrix. rdQM problems are desk scale (n <= a few
// hundred), so no effort is spent on blocking or sparsity.
template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, T v = T(0)) : r_(rows), c_(cols), a_(size_t(rows) * cols, v) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  T& operator()(int i, int j) { return a_[size_t(i) * c_ + j]; }
  const T& operator()(int i, int j) const { return a_[size_t(i) * c_ + j]; }

  Mat transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  int r_ = 0, c_ = 0;
  std::vector<T> a_;
};

using DMat = Mat<double>;
using ZMat = Mat<std::complex<double>>;

template <class T>
Mat<T> operator*(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      T aik = a(i, k);
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class T>
Mat<T> operator+(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

template <class T>
Mat<T> operator-(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

template <class T>
Mat<T> operator*(const Mat<T>& a, T s) {
  Mat<T> c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * s;
  return c;
}

template <class T>
std::vector<T> operator*(const Mat<T>& a, const std::vector<T>& x) {
  std::vector<T> y(a.rows(), T(0));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

inline double max_abs(const DMat& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

inline double max_abs(const ZMat& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

inline DMat commutator(const DMat& a, const DMat& b) { return a * b - b * a; }

inline ZMat to_complex(const DMat& a) {
  ZMat z(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) z(i, j) = a(i, j);
  return z;
}

// ---------------------------------------------------------------------------
// Symmetric tridiagonal eigensolver (implicit-shift QL with eigenvectors)
// ---------------------------------------------------------------------------

struct SymTriEigen {
  std::vector<double> values;  // ascending
  DMat vectors;                // column k is the k-th eigenvector
  int iterations = 0;
};

// diag d[0..n-1], off-diagonal e[0..n-2].
inline SymTriEigen tridiag_eigen(std::vector<double> d, std::vector<double> e) {
  const int n = static_cast<int>(d.size());
  DMat z = DMat::identity(n);
  e.push_back(0.0);
  int total_iter = 0;
  auto sign_of = [](double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); };
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw solver_error("tridiagonal QL failed to converge after 60 sweeps");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            double zk = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * zk;
            z(k, i) = c * z(k, i) - s * zk;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
    total_iter += iter;
  }
  // sort ascending, carry vectors
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
  SymTriEigen out;
  out.values.resize(n);
  out.vectors = DMat(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = d[idx[k]];
    for (int i = 0; i < n; ++i) out.vectors(i, k) = z(i, idx[k]);
  }
  out.iterations = total_iter;
  return out;
}

// ---------------------------------------------------------------------------
// LU determinant with partial pivoting (double or DDouble)
// ---------------------------------------------------------------------------

template <class T>
struct DetResult {
  T value{};
  double condition_estimate = 1.0;  // Hadamard ratio: prod ||row|| / |det|
};

inline double fabs_like(double x) { return std::abs(x); }
inline double fabs_like(const DDouble& x) { return std::abs(to_double(x)); }

template <class T>
DetResult<T> lu_determinant(Mat<T> a) {
  const int n = a.rows();
  double hadamard = 1.0;
  for (int i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (int j = 0; j < n; ++j) r2 += fabs_like(a(i, j)) * fabs_like(a(i, j));
    hadamard *= std::sqrt(r2);
  }
  T det(1.0);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (fabs_like(a(i, k)) > fabs_like(a(piv, k))) piv = i;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    T pk = a(k, k);
    if (fabs_like(pk) == 0.0) return {T(0.0), 1e308};
    det *= pk;
    for (int i = k + 1; i < n; ++i) {
      T f = a(i, k) / pk;
      for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return {det, hadamard / std::max(fabs_like(det), 1e-300)};
}

// Solve a small dense linear system in place (partial pivoting).
inline std::vector<double> solve_dense(DMat a, std::vector<double> b) {
  const int n = a.rows();
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) == 0.0) throw solver_error("singular linear system");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

// Least squares via normal equations; small systems only.
inline std::vector<double> solve_least_squares(const DMat& a, const std::vector<double>& b,
                                               double* residual = nullptr) {
  const int m = a.rows(), n = a.cols();
  DMat ata(n, n);
  std::vector<double> atb(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += a(k, i) * a(k, j);
      ata(i, j) = s;
    }
    for (int k = 0; k < m; ++k) atb[i] += a(k, i) * b[k];
  }
  std::vector<double> x = solve_dense(ata, atb);
  if (residual) {
    double r2 = 0.0;
    for (int k = 0; k < m; ++k) {
      double rk = -b[k];
      for (int j = 0; j < n; ++j) rk += a(k, j) * x[j];
      r2 += rk * rk;
    }
    *residual = std::sqrt(r2);
  }
  return x;
}

// Fit a degree-d polynomial through samples (x_i, y_i) by Vandermonde solve
// (d+1 points) or least squares (more points). Coefficients low-to-high.
inline std::vector<double> fit_polynomial(const std::vector<double>& x, const std::vector<double>& y,
                                          int degree) {
  const int m = static_cast<int>(x.size());
  DMat v(m, degree + 1);
  for (int i = 0; i < m; ++i) {
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      v(i, j) = p;
      p *= x[i];
    }
  }
  if (m == degree + 1) return solve_dense(v, y);
  return solve_least_squares(v, y);
}

inline double eval_polynomial_coeffs(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) r = r * x + c[i];
  return r;
}

// Chebyshev points mapped to [a,b].
inline std::vector<double> chebyshev_points(int n, double a, double b) {
  std::vector<double> x(n);
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < n; ++k) {
    double t = std::cos(pi * (k + 0.5) / n);
    x[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  return x;
}

inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const std::complex<double>& x) { return std::abs(x); }
inline double abs_of(const DDouble& x) { return std::abs(to_double(x)); }
inline double abs_of(const CDDouble& x) { return abs_approx(x); }

// Polynomial held as values on a fixed node set; evaluation anywhere
// (including complex points) by the barycentric formula. T is the value
// scalar: off-axis evaluation amplifies node-value noise by the analytic
// ellipse factor, so the ladder paths keep T = DDouble.
template <class T>
struct BarycentricT {
  std::vector<double> nodes;
  std::vector<T> w, vals;

  static BarycentricT on(std::vector<double> ns) {
    BarycentricT b;
    b.nodes = std::move(ns);
    const int n = int(b.nodes.size());
    b.w.assign(n, T(1.0));
    double span = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) span = std::max(span, std::abs(b.nodes[i] - b.nodes[j]));
    double s = 4.0 / std::max(span, 1e-300);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        if (j != k) b.w[k] /= (T(b.nodes[k]) - T(b.nodes[j])) * T(s);
    b.vals.assign(n, T(0.0));
    return b;
  }

  template <class Z>
  Z eval(const Z& z) const {
    const int n = int(nodes.size());
    Z num(0.0), den(0.0);
    for (int k = 0; k < n; ++k) {
      Z dz = z - Z(nodes[k]);
      if (abs_of(dz) < 1e-15) return Z(vals[k]);
      Z c = Z(w[k]) / dz;
      num += c * Z(vals[k]);
      den += c;
    }
    return num / den;
  }
};

using Barycentric = BarycentricT<double>;

}  // namespace dqm
