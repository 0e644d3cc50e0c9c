#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ssf/opcore.hpp"

namespace ssf {

enum class LogMethod { Eigen, Quadrature };

// Which cut the scalar logarithm uses. Only NegativeImaginary is correct for
// dissipative matrices; PositiveImaginary exists so that verification suites
// can be run against a deliberately wrong branch.
enum class LogBranch { NegativeImaginary, PositiveImaginary };

struct LogOptions {
  LogMethod method = LogMethod::Eigen;
  LogBranch branch = LogBranch::NegativeImaginary;
};

/// Scalar logarithm with the cut along the closed negative imaginary axis,
/// arg w in (-pi/2, 3pi/2). Throws BranchCutHit on the cut.
cplx log_cut(cplx w, LogBranch branch = LogBranch::NegativeImaginary);

/// Square matrix with positive semidefinite imaginary part (K - K*)/(2i) and
/// no eigenvalue within 1e-10 of the closed negative imaginary axis.
class DissipativeMatrix {
 public:
  explicit DissipativeMatrix(CMatrix entries);

  const CMatrix& entries() const noexcept { return entries_; }
  Eigen::Index dim() const noexcept { return entries_.rows(); }

 private:
  CMatrix entries_;
};

/// log K via eigendecomposition or via adaptive quadrature of
///   log K = -i * int_0^inf [(K + i t)^{-1} - (1 + i t)^{-1}] dt.
/// The eigen path falls back to quadrature when eigenvalues cluster closer
/// than 1e-8 or the eigenvector basis is ill conditioned.
CMatrix log_dissipative(const DissipativeMatrix& k, LogOptions opts = {});

/// log(K*) defined by the same integral with K replaced by K*. Requires that
/// K has no eigenvalue on the closed positive imaginary axis. This equals
/// (log K)* only when every eigenvalue of K has positive real part; an
/// eigenvalue with Re < 0 contributes an extra 2*pi*i on its spectral
/// subspace.
CMatrix log_adjoint(const DissipativeMatrix& k, LogMethod method = LogMethod::Quadrature);

struct RealInterval {
  double lo;
  double hi;
  bool contains(double x) const { return lo < x && x < hi; }
};

/// Matrix-valued Nevanlinna function on C \ R, optionally continued to an open
/// real interval. The callable is invoked directly in both half-planes, so the
/// reflection N(conj z) = N(z)* is a property of the callable, not enforced.
class NevanlinnaEvaluator {
 public:
  using Fn = std::function<CMatrix(cplx)>;

  NevanlinnaEvaluator(Eigen::Index boundary_dim, Fn fn,
                      std::optional<RealInterval> real_interval = std::nullopt);

  Eigen::Index boundary_dim() const noexcept { return dim_; }
  const std::optional<RealInterval>& real_interval() const noexcept { return interval_; }

  CMatrix operator()(cplx z) const;

  // U* N(z) U for a fixed unitary U.
  NevanlinnaEvaluator conjugated(const CMatrix& unitary) const;

 private:
  Eigen::Index dim_;
  Fn fn_;
  std::optional<RealInterval> interval_;
};

/// log N(z) for Im z > 0, (log N(conj z))* for Im z < 0.
CMatrix log_nev(const NevanlinnaEvaluator& n, cplx z, LogOptions opts = {});

/// Decreasing positive epsilons for the boundary limit eps -> 0+, with the
/// Richardson order applied to the two smallest entries.
struct EpsilonSchedule {
  std::vector<double> values{1e-3, 1e-4, 1e-5};
  int extrapolation_order = 1;

  static EpsilonSchedule geometric(double start, double ratio, int count, int order = 1);
  void validate() const;
};

/// Extrapolates samples f(eps_k) to eps = 0. Throws ExtrapolationUnstable when
/// successive differences grow along the schedule.
double extrapolate_to_zero(const EpsilonSchedule& sched, std::span<const double> samples);

/// Outcome of the per-point boundary limit: points whose extrapolation was
/// unstable (typically lambda within eps of a spectral point) carry the raw
/// value at the smallest epsilon and are counted here.
struct BoundaryValue {
  double value = 0.0;
  bool unstable = false;
};

/// Samples f(eps) along the schedule and extrapolates; an unstable
/// extrapolation falls back to the smallest-eps sample and is flagged.
BoundaryValue boundary_limit(const EpsilonSchedule& sched,
                             const std::function<double(double)>& sample);

/// (1/pi) * sum_j (Im log N(lambda + i eps) phi_j, phi_j), extrapolated in eps.
/// With no basis the standard coordinate basis is used.
BoundaryValue im_log_trace_limit(const NevanlinnaEvaluator& n, double lambda,
                                 const EpsilonSchedule& sched, LogOptions opts = {},
                                 const CMatrix* basis = nullptr);

struct DensityReport {
  std::vector<double> lambda_grid;
  std::vector<double> density_trace;
  CMatrix constant_c;  // Re log N(i)
  std::size_t unstable_points = 0;
};

DensityReport xi_density(const NevanlinnaEvaluator& n, std::span<const double> grid,
                         const EpsilonSchedule& sched, LogOptions opts = {});

/// Central-difference evaluation (steps h and 2h, extrapolated) of
///   ( tr d^{l-1}/dz^{l-1} (N^{-1} N'),  tr d^l/dz^l log N )
/// at z with step h. The two entries agree for any Nevanlinna function.
std::pair<cplx, cplx> log_derivative_trace_check(const NevanlinnaEvaluator& n, cplx z, int order,
                                                 double h);

}  // namespace ssf
