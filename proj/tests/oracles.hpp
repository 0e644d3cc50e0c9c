#pragma once
// Reference computations that share no code with the library: cyclic Jacobi
// eigenvalues, Sturm-sequence counts for finite-difference operators,
// closed-form boundary maps and a tridiagonal resolvent trace.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
inline constexpr double pi = 3.14159265358979323846;

// Eigenvalues of a complex Hermitian matrix from the real symmetric embedding
// [[Re, -Im], [Im, Re]] (each eigenvalue appears twice).
inline std::vector<double> jacobi_eigenvalues(const CMat& h) {
  const int n = static_cast<int>(h.rows());
  const int m = 2 * n;
  std::vector<double> a(static_cast<std::size_t>(m * m));
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * m + j)]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx v = 0.5 * (h(i, j) + std::conj(h(j, i)));
      at(i, j) = v.real();
      at(i + n, j + n) = v.real();
      at(i, j + n) = -v.imag();
      at(i + n, j) = v.imag();
    }
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < m; ++p) {
      for (int q = p + 1; q < m; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < m; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < m; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(ev.begin(), ev.end());
  std::vector<double> out;
  for (int i = 0; i < m; i += 2) out.push_back(0.5 * (ev[static_cast<std::size_t>(i)] + ev[static_cast<std::size_t>(i + 1)]));
  return out;
}

inline long count_below(const std::vector<double>& ev, double lambda) {
  return static_cast<long>(std::count_if(ev.begin(), ev.end(), [&](double e) { return e < lambda; }));
}

// Number of eigenvalues below lambda of the symmetric tridiagonal matrix with
// diagonal d and constant off-diagonal e (Sturm sequence).
inline long sturm_count(const std::vector<double>& d, double e, double lambda) {
  long neg = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    q = d[i] - lambda - (i == 0 ? 0.0 : e * e / q);
    if (q == 0.0) q = 1e-300;
    if (q < 0) ++neg;
  }
  return neg;
}

// Dirichlet FD discretization of -u'' + V u on (lo, hi) with n interior nodes.
struct FdOperator {
  std::vector<double> diag;
  double off;
  long count(double lambda) const { return sturm_count(diag, off, lambda); }
};

inline FdOperator fd_dirichlet(double lo, double hi, int n, const std::function<double(double)>& v) {
  const double h = (hi - lo) / (n + 1);
  FdOperator op{std::vector<double>(static_cast<std::size_t>(n)), -1.0 / (h * h)};
  for (int i = 0; i < n; ++i) op.diag[static_cast<std::size_t>(i)] = 2.0 / (h * h) + v(lo + (i + 1) * h);
  return op;
}

// Diagonal of (T - z)^{-1} for a symmetric tridiagonal T from left and right
// pivot recursions.
inline std::vector<cplx> tridiag_inverse_diagonal(const std::vector<double>& d, double e, cplx z) {
  const std::size_t n = d.size();
  std::vector<cplx> l(n), r(n), out(n);
  l[0] = d[0] - z;
  for (std::size_t i = 1; i < n; ++i) l[i] = d[i] - z - e * e / l[i - 1];
  r[n - 1] = d[n - 1] - z;
  for (std::size_t i = n - 1; i-- > 0;) r[i] = d[i] - z - e * e / r[i + 1];
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / (l[i] + r[i] - (d[i] - z));
  return out;
}

// tr((B - z)^{-1} - (A - z)^{-1}) for A = -d^2/dx^2 and B = A + V on the line,
// truncated to (-half_width, half_width) with Dirichlet ends and step h.
inline cplx fd_line_trace(const std::function<double(double)>& v, double half_width, double h, cplx z) {
  const int n = static_cast<int>(std::lround(2.0 * half_width / h)) - 1;
  std::vector<double> da(static_cast<std::size_t>(n)), db(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = -half_width + (i + 1) * h;
    da[static_cast<std::size_t>(i)] = 2.0 / (h * h);
    db[static_cast<std::size_t>(i)] = da[static_cast<std::size_t>(i)] + v(x);
  }
  const double e = -1.0 / (h * h);
  const auto ra = tridiag_inverse_diagonal(da, e, z);
  const auto rb = tridiag_inverse_diagonal(db, e, z);
  cplx s = 0.0;
  for (int i = 0; i < n; ++i) s += rb[static_cast<std::size_t>(i)] - ra[static_cast<std::size_t>(i)];
  return s;
}

// Principal sqrt with the cut on [0, inf): Im > 0.
inline cplx sqrt_im_positive(cplx z) {
  cplx k = std::sqrt(z);
  if (k.imag() < 0) k = -k;
  return k;
}

// Dirichlet-to-Neumann map of -u'' = z u on (0, L):
// (u(0), u(L)) -> (-u'(0), u'(L)) = k / sin(kL) [[cos kL, -1], [-1, cos kL]].
inline CMat free_dtn(double length, cplx z) {
  const cplx k = std::sqrt(z);
  const cplx c = std::cos(k * length), s = std::sin(k * length);
  CMat d(2, 2);
  d << c, -1.0, -1.0, c;
  return (k / s) * d;
}

// Eigenvalues of -u'' on (0, L) with -u'(0) = b0 u(0), u'(L) = b1 u(L), as
// roots of the entire secular function f(l) = -l S - b0 C - b1 (C - b0 S),
// C = cos(sqrt(l) L), S = sin(sqrt(l) L) / sqrt(l).
inline std::vector<double> robin_free_eigenvalues(double length, double b0, double b1, double lo, double hi) {
  auto f = [&](double lambda) {
    double c, s;
    if (lambda > 0) {
      const double k = std::sqrt(lambda);
      c = std::cos(k * length);
      s = std::sin(k * length) / k;
    } else if (lambda < 0) {
      const double k = std::sqrt(-lambda);
      c = std::cosh(k * length);
      s = std::sinh(k * length) / k;
    } else {
      c = 1.0;
      s = length;
    }
    return -lambda * s - b0 * c - b1 * (c - b0 * s);
  };
  std::vector<double> roots;
  const int steps = 200000;
  double x0 = lo, f0 = f(lo);
  for (int i = 1; i <= steps; ++i) {
    const double x1 = lo + (hi - lo) * i / steps;
    const double f1 = f(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if (f0 * f1 < 0) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

// exp by scaling and squaring with a long Taylor series.
inline CMat expm(const CMat& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::ldexp(1.0, s) > 0.25) ++s;
  const CMat x = a / std::ldexp(1.0, s);
  CMat term = CMat::Identity(a.rows(), a.cols());
  CMat sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

inline CMat random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  return 0.5 * (m + m.adjoint());
}

inline CMat random_complex(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

}  // namespace oracle
