#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace ssf::quad {

// Magnitude used for error control: absolute value for scalars, largest entry
// modulus for Eigen matrices.
inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(std::complex<double> x) { return std::abs(x); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <class V>
struct Result {
  V value;
  double error = 0.0;
  bool converged = false;
  int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
  double a, b;
  V value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F, class V>
Panel<V> kronrod15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const V fc = f(center);
  V kronrod = fc * kWgk[7];
  V gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const V f1 = f(center - dx);
    const V f2 = f(center + dx);
    kronrod = kronrod + (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss = gauss + (f1 + f2) * kWg[j / 2];
  }
  V value = kronrod * half;
  const double err = magnitude(V((kronrod - gauss) * half));
  return {a, b, std::move(value), err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of a scalar- or
/// matrix-valued f over [a, b], starting from the given breakpoints (which
/// must lie in [a, b]). The panel with the largest error estimate is bisected
/// until the summed error is below max(abs_tol, rel_tol * |integral|) or
/// max_intervals is exhausted.
template <class F>
auto gauss_kronrod(const F& f, std::vector<double> breakpoints, double abs_tol, double rel_tol,
                   int max_intervals = 2000) {
  using V = std::decay_t<decltype(f(0.0))>;
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  std::priority_queue<detail::Panel<V>> panels;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    panels.push(detail::kronrod15<F, V>(f, breakpoints[i], breakpoints[i + 1]));
  }

  auto totals = [&] {
    auto copy = panels;
    V sum = copy.top().value;
    double err = copy.top().error;
    copy.pop();
    while (!copy.empty()) {
      sum = sum + copy.top().value;
      err += copy.top().error;
      copy.pop();
    }
    return std::pair<V, double>{sum, err};
  };

  auto [sum, err] = totals();
  while (err > std::max(abs_tol, rel_tol * magnitude(sum)) &&
         static_cast<int>(panels.size()) < max_intervals) {
    const auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      panels.push(worst);
      break;
    }
    auto left = detail::kronrod15<F, V>(f, worst.a, mid);
    auto right = detail::kronrod15<F, V>(f, mid, worst.b);
    sum = sum - worst.value + left.value + right.value;
    err += left.error + right.error - worst.error;
    panels.push(std::move(left));
    panels.push(std::move(right));
  }
  std::tie(sum, err) = totals();
  Result<V> out{sum, err, err <= std::max(abs_tol, rel_tol * magnitude(sum)),
                static_cast<int>(panels.size())};
  return out;
}

}  // namespace ssf::quad
