#include "ssf/nevlog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "ssf/errors.hpp"
#include "ssf/quadrature.hpp"

namespace ssf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCutTol = 1e-10;
constexpr double kClusterTol = 1e-8;
constexpr double kMaxEigvecCondition = 1e10;

// Distance from w to the ray {-i t : t >= 0}.
double distance_to_cut(cplx w) { return w.imag() <= 0.0 ? std::abs(w.real()) : std::abs(w); }

double entry_scale(const CMatrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

std::string format_value(cplx w) {
  std::ostringstream os;
  os.precision(12);
  os << w.real() << (w.imag() < 0 ? " - " : " + ") << std::abs(w.imag()) << "i";
  return os.str();
}

struct EigenData {
  CVector values;
  CMatrix vectors;
};

EigenData eigen_decompose(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> solver(m, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::QuadratureFailure, "complex eigendecomposition did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

void require_off_cut(const CVector& eigenvalues, const char* what) {
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (distance_to_cut(eigenvalues(i)) < kCutTol) {
      throw Error(ErrorKind::BranchCutHit, std::string(what) + " has eigenvalue " +
                                               format_value(eigenvalues(i)) +
                                               " on the negative imaginary axis");
    }
  }
}

bool eigen_path_usable(const EigenData& eig, Eigen::FullPivLU<CMatrix>& lu) {
  const auto& w = eig.values;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    for (Eigen::Index j = i + 1; j < w.size(); ++j) {
      const double scale = std::max({1.0, std::abs(w(i)), std::abs(w(j))});
      if (std::abs(w(i) - w(j)) < kClusterTol * scale) return false;
    }
  }
  lu.compute(eig.vectors);
  if (!lu.isInvertible()) return false;
  const double cond = operator_norm(eig.vectors) * operator_norm(lu.inverse());
  return cond < kMaxEigvecCondition;
}

CMatrix log_via_eigen(const EigenData& eig, const Eigen::FullPivLU<CMatrix>& lu, LogBranch branch) {
  CVector logs(eig.values.size());
  for (Eigen::Index i = 0; i < logs.size(); ++i) logs(i) = log_cut(eig.values(i), branch);
  return eig.vectors * logs.asDiagonal() * lu.inverse();
}

// Tail of the defining integral beyond t = cutoff:
//   -i * int_cutoff^inf [(K + i t)^{-1} - (1 + i t)^{-1}] dt = log(I + X),
// X = (K - I)/(1 + i cutoff), summed as a Mercator series (|X| <= 1/16).
CMatrix integral_tail(const CMatrix& k, double cutoff) {
  const auto n = k.rows();
  const CMatrix x = (k - CMatrix::Identity(n, n)) / cplx(1.0, cutoff);
  CMatrix power = x;
  CMatrix sum = x;
  for (int j = 2; j < 200; ++j) {
    power = power * x;
    const CMatrix term = power * (((j % 2) == 0 ? -1.0 : 1.0) / j);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  return sum;
}

CMatrix log_via_quadrature(const CMatrix& k, const CVector& eigenvalues) {
  const auto n = k.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const double cutoff = std::max(1.0, 16.0 * operator_norm(k - id));

  std::vector<double> breaks{0.0, cutoff};
  double smallest = cutoff;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const cplx w = eigenvalues(i);
    smallest = std::min(smallest, std::max(std::abs(w), 1e-8));
    // Near-singular abscissae of (K + i t) sit around t = -Im w.
    for (double t : {-w.imag() - std::abs(w.real()), -w.imag(), -w.imag() + std::abs(w.real())}) {
      if (t > 0.0 && t < cutoff) breaks.push_back(t);
    }
  }
  for (double t = 1e-3 * smallest; t < cutoff; t *= 10.0) breaks.push_back(t);

  auto integrand = [&](double t) -> CMatrix {
    CMatrix shifted = k;
    shifted.diagonal().array() += cplx(0.0, t);
    return shifted.partialPivLu().inverse() - id / cplx(1.0, t);
  };
  const auto res = quad::gauss_kronrod(integrand, breaks, 1e-13, 1e-13, 8000);
  if (!res.converged || !res.value.allFinite()) {
    std::ostringstream os;
    os << "adaptive log integral reached error " << res.error << " with " << res.intervals
       << " panels";
    throw Error(ErrorKind::QuadratureFailure, os.str());
  }
  return cplx(0.0, -1.0) * res.value + integral_tail(k, cutoff);
}

CMatrix log_off_cut(const CMatrix& k, const EigenData& eig, LogMethod method, LogBranch branch) {
  if (method == LogMethod::Eigen) {
    Eigen::FullPivLU<CMatrix> lu;
    if (eigen_path_usable(eig, lu)) return log_via_eigen(eig, lu, branch);
    // Near-defective input: fall through to the integral definition.
  }
  CMatrix out = log_via_quadrature(k, eig.values);
  if (branch == LogBranch::PositiveImaginary) {
    // Only reached by fault injection; shift eigenvalues with arg > pi/2.
    Eigen::FullPivLU<CMatrix> lu(eig.vectors);
    CVector shift(eig.values.size());
    for (Eigen::Index i = 0; i < shift.size(); ++i) {
      shift(i) = std::arg(eig.values(i)) > kPi / 2 ? cplx(0.0, -2.0 * kPi) : cplx(0.0);
    }
    out += eig.vectors * shift.asDiagonal() * lu.inverse();
  }
  return out;
}

}  // namespace

cplx log_cut(cplx w, LogBranch branch) {
  if (distance_to_cut(w) == 0.0) {
    throw Error(ErrorKind::BranchCutHit, "log evaluated on the cut at " + format_value(w));
  }
  double a = std::arg(w);
  if (branch == LogBranch::NegativeImaginary) {
    if (a <= -kPi / 2) a += 2.0 * kPi;
  } else if (a > kPi / 2) {
    a -= 2.0 * kPi;
  }
  return {std::log(std::abs(w)), a};
}

DissipativeMatrix::DissipativeMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw Error(ErrorKind::InvalidInput, "dissipative matrix must be square and non-empty");
  }
  if (!entries_.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "dissipative matrix has non-finite entries");
  }
  const double min_im = hermitian_eigenvalues(imaginary_part(entries_)).minCoeff();
  if (min_im < -kCutTol * entry_scale(entries_)) {
    std::ostringstream os;
    os << "imaginary part is not positive semidefinite (min eigenvalue " << min_im << ")";
    throw Error(ErrorKind::InvalidInput, os.str());
  }
}

CMatrix log_dissipative(const DissipativeMatrix& k, LogOptions opts) {
  const EigenData eig = eigen_decompose(k.entries());
  require_off_cut(eig.values, "matrix");
  return log_off_cut(k.entries(), eig, opts.method, opts.branch);
}

CMatrix log_adjoint(const DissipativeMatrix& k, LogMethod method) {
  const CMatrix adj = k.entries().adjoint();
  const EigenData eig = eigen_decompose(adj);
  // i t in rho(K) for t >= 0  <=>  -i t in rho(K*).
  require_off_cut(eig.values, "adjoint");
  return log_off_cut(adj, eig, method, LogBranch::NegativeImaginary);
}

NevanlinnaEvaluator::NevanlinnaEvaluator(Eigen::Index boundary_dim, Fn fn,
                                         std::optional<RealInterval> real_interval)
    : dim_(boundary_dim), fn_(std::move(fn)), interval_(real_interval) {
  if (dim_ < 1) throw Error(ErrorKind::InvalidInput, "boundary dimension must be >= 1");
  if (!fn_) throw Error(ErrorKind::InvalidInput, "evaluator callable is empty");
}

CMatrix NevanlinnaEvaluator::operator()(cplx z) const {
  if (z.imag() == 0.0 && !(interval_ && interval_->contains(z.real()))) {
    throw Error(ErrorKind::InvalidInput,
                "real argument " + format_value(z) + " outside the interval of continuation");
  }
  CMatrix out = fn_(z);
  if (out.rows() != dim_ || out.cols() != dim_) {
    throw Error(ErrorKind::InvalidInput, "evaluator returned a matrix of the wrong size");
  }
  return out;
}

NevanlinnaEvaluator NevanlinnaEvaluator::conjugated(const CMatrix& unitary) const {
  if (unitary.rows() != dim_ || unitary.cols() != dim_) {
    throw Error(ErrorKind::InvalidInput, "basis change has the wrong size");
  }
  auto fn = fn_;
  return NevanlinnaEvaluator(
      dim_, [fn, unitary](cplx z) -> CMatrix { return unitary.adjoint() * fn(z) * unitary; },
      interval_);
}

CMatrix log_nev(const NevanlinnaEvaluator& n, cplx z, LogOptions opts) {
  const bool lower = z.imag() < 0.0;
  const CMatrix value = n(lower ? std::conj(z) : z);
  if (smallest_singular_value(value) <= 1e-12) {
    throw Error(ErrorKind::SingularValue,
                "N(z) is numerically singular at z = " + format_value(z));
  }
  CMatrix out = log_dissipative(DissipativeMatrix(value), opts);
  if (lower) out.adjointInPlace();
  return out;
}

EpsilonSchedule EpsilonSchedule::geometric(double start, double ratio, int count, int order) {
  EpsilonSchedule s;
  s.values.clear();
  double eps = start;
  for (int i = 0; i < count; ++i, eps *= ratio) s.values.push_back(eps);
  s.extrapolation_order = order;
  s.validate();
  return s;
}

void EpsilonSchedule::validate() const {
  if (values.empty()) throw Error(ErrorKind::InvalidInput, "epsilon schedule is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw Error(ErrorKind::InvalidInput, "epsilon schedule entries must be positive");
    }
    if (i > 0 && !(values[i] < values[i - 1])) {
      throw Error(ErrorKind::InvalidInput, "epsilon schedule must be strictly decreasing");
    }
  }
  if (extrapolation_order != 0 && extrapolation_order != 1) {
    throw Error(ErrorKind::InvalidInput, "extrapolation order must be 0 or 1");
  }
  if (extrapolation_order == 1 && values.size() < 2) {
    throw Error(ErrorKind::InvalidInput, "first-order extrapolation needs two epsilons");
  }
}

double extrapolate_to_zero(const EpsilonSchedule& sched, std::span<const double> samples) {
  sched.validate();
  if (samples.size() != sched.values.size()) {
    throw Error(ErrorKind::InvalidInput, "sample count does not match the epsilon schedule");
  }
  for (std::size_t k = 0; k + 2 < samples.size(); ++k) {
    const double d0 = std::abs(samples[k + 1] - samples[k]);
    const double d1 = std::abs(samples[k + 2] - samples[k + 1]);
    if (d1 > d0 + 1e-12) {
      std::ostringstream os;
      os << "differences grow from " << d0 << " to " << d1 << " at eps = "
         << sched.values[k + 2];
      throw Error(ErrorKind::ExtrapolationUnstable, os.str());
    }
  }
  const std::size_t last = samples.size() - 1;
  if (sched.extrapolation_order == 0) return samples[last];
  const double e1 = sched.values[last - 1];
  const double e2 = sched.values[last];
  return samples[last] + (samples[last] - samples[last - 1]) * e2 / (e1 - e2);
}

BoundaryValue boundary_limit(const EpsilonSchedule& sched,
                             const std::function<double(double)>& sample) {
  sched.validate();
  std::vector<double> samples;
  samples.reserve(sched.values.size());
  for (double eps : sched.values) samples.push_back(sample(eps));
  try {
    return {extrapolate_to_zero(sched, samples), false};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ExtrapolationUnstable) throw;
    return {samples.back(), true};
  }
}

BoundaryValue im_log_trace_limit(const NevanlinnaEvaluator& n, double lambda,
                                 const EpsilonSchedule& sched, LogOptions opts,
                                 const CMatrix* basis) {
  return boundary_limit(sched, [&](double eps) {
    const CMatrix im = imaginary_part(log_nev(n, cplx(lambda, eps), opts));
    double sum = 0.0;
    if (basis == nullptr) {
      sum = im.diagonal().real().sum();
    } else {
      for (Eigen::Index j = 0; j < basis->cols(); ++j) {
        sum += (basis->col(j).adjoint() * im * basis->col(j))(0, 0).real();
      }
    }
    return sum / kPi;
  });
}

DensityReport xi_density(const NevanlinnaEvaluator& n, std::span<const double> grid,
                         const EpsilonSchedule& sched, LogOptions opts) {
  sched.validate();
  DensityReport report;
  report.lambda_grid.assign(grid.begin(), grid.end());
  report.density_trace.reserve(grid.size());
  for (double lambda : grid) {
    const auto bv = im_log_trace_limit(n, lambda, sched, opts);
    report.density_trace.push_back(bv.value);
    report.unstable_points += bv.unstable ? 1 : 0;
  }
  report.constant_c = hermitian_part(log_nev(n, cplx(0.0, 1.0), opts));
  return report;
}

namespace {

// h^{-k} * sum_j (-1)^j C(k, j) f(z + (k/2 - j) h)
template <class F>
cplx central_difference(const F& f, cplx z, int k, double h) {
  if (k == 0) return f(z);
  cplx sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    sum += ((j % 2) == 0 ? 1.0 : -1.0) * binom * f(z + (0.5 * k - j) * h);
    binom = binom * (k - j) / (j + 1);
  }
  return sum / std::pow(h, k);
}

// Steps h and 2h combined so the h^2 error terms cancel.
template <class F>
cplx central_difference_extrapolated(const F& f, cplx z, int k, double h) {
  if (k == 0) return f(z);
  return (4.0 * central_difference(f, z, k, h) - central_difference(f, z, k, 2.0 * h)) / 3.0;
}

}  // namespace

std::pair<cplx, cplx> log_derivative_trace_check(const NevanlinnaEvaluator& n, cplx z, int order,
                                                 double h) {
  if (order < 1) throw Error(ErrorKind::InvalidInput, "derivative order must be >= 1");
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidInput, "finite-difference step must be > 0");

  auto log_derivative_trace = [&](cplx w) {
    const CMatrix value = n(w);
    const CMatrix d1 = (n(w + h) - n(w - h)) / (2.0 * h);
    const CMatrix d2 = (n(w + 2.0 * h) - n(w - 2.0 * h)) / (4.0 * h);
    const CMatrix derivative = (4.0 * d1 - d2) / 3.0;
    return (value.partialPivLu().solve(derivative)).trace();
  };
  auto trace_log = [&](cplx w) { return log_nev(n, w).trace(); };

  return {central_difference_extrapolated(log_derivative_trace, z, order - 1, h),
          central_difference_extrapolated(trace_log, z, order, h)};
}

}  // namespace ssf
