#include "ssf/triple.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "ssf/errors.hpp"

namespace ssf {

namespace {

HermitianOperator perturbed(const HermitianOperator& a, const CMatrix& g, const CMatrix& t) {
  if (g.rows() != static_cast<Eigen::Index>(a.dim())) {
    throw Error(ErrorKind::InvalidInput, "G must have as many rows as A");
  }
  if (t.rows() != g.cols() || t.cols() != g.cols()) {
    throw Error(ErrorKind::InvalidInput, "T must be d x d with d = columns of G");
  }
  return HermitianOperator(a.entries() + g * hermitian_part(t) * g.adjoint());
}

std::string describe_point(cplx z) {
  std::ostringstream os;
  os.precision(12);
  os << "z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

PerturbationPair::PerturbationPair(HermitianOperator a, CMatrix g, CMatrix t,
                                   std::optional<double> sign_checkpoint)
    : a_(std::move(a)), g_(std::move(g)), t_(std::move(t)), b_(perturbed(a_, g_, t_)),
      zeta0_(sign_checkpoint) {
  if (g_.cols() < 1 || g_.cols() > g_.rows()) {
    throw Error(ErrorKind::InvalidInput, "G must be n x d with 1 <= d <= n");
  }
  if (smallest_singular_value(g_) <= 1e-10) {
    throw Error(ErrorKind::InvalidInput, "G is not injective (smallest singular value <= 1e-10)");
  }
  if ((t_ - t_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw Error(ErrorKind::InvalidInput, "T is not Hermitian");
  }
  t_ = hermitian_part(t_);
  const RVector tau = hermitian_eigenvalues(t_);
  if (tau.cwiseAbs().minCoeff() <= 1e-10) {
    throw Error(ErrorKind::InvalidInput, "T is not invertible (smallest |eigenvalue| <= 1e-10)");
  }
  coupling_positive_ = tau.minCoeff() > 0.0;
  t_inv_ = hermitian_part(t_.inverse());

  if (zeta0_) {
    const double z0 = *zeta0_;
    if (a_.spectral_distance(z0) <= kSpectrumTol || b_.spectral_distance(z0) <= kSpectrumTol) {
      throw Error(ErrorKind::InvalidInput, "zeta0 lies in the spectrum of A or B");
    }
    if (coupling_positive_ && z0 < spectral_min()) {
      const CMatrix diff = resolvent(a_, z0) - resolvent(b_, z0);
      const double lo = hermitian_eigenvalues(diff).minCoeff();
      if (lo < -1e-10 * std::max(1.0, operator_norm(diff))) {
        throw Error(ErrorKind::InvalidInput,
                    "sign condition (A - zeta0)^{-1} >= (B - zeta0)^{-1} fails at zeta0");
      }
    }
  }
}

double PerturbationPair::spectral_min() const {
  return std::min(a_.min_eigenvalue(), b_.min_eigenvalue());
}

double PerturbationPair::spectral_max() const {
  return std::max(a_.max_eigenvalue(), b_.max_eigenvalue());
}

bool PerturbationPair::regular_point(cplx z) const {
  return a_.spectral_distance(z) > kSpectrumTol && b_.spectral_distance(z) > kSpectrumTol;
}

NevanlinnaEvaluator PerturbationPair::weyl_function() const {
  std::optional<RealInterval> gap;
  if (zeta0_) {
    const auto& ev = a_.eigenvalues();
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) < *zeta0_) lo = std::max(lo, ev(i));
      if (ev(i) > *zeta0_) hi = std::min(hi, ev(i));
    }
    gap = RealInterval{lo, hi};
  }
  // The evaluator owns a copy so it can outlive this pair.
  auto self = std::make_shared<PerturbationPair>(*this);
  return NevanlinnaEvaluator(d(), [self](cplx z) { return weyl_eval(*self, z); }, gap);
}

PairSplit PerturbationPair::split_through_common() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(t_);
  const RVector& tau = solver.eigenvalues();
  const CMatrix& v = solver.eigenvectors();

  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index i = 0; i < tau.size(); ++i) (tau(i) > 0 ? pos : neg).push_back(i);

  auto columns = [&](const std::vector<Eigen::Index>& idx) {
    CMatrix out(v.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = v.col(idx[j]);
    return out;
  };
  auto magnitudes = [&](const std::vector<Eigen::Index>& idx) {
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(idx.size()),
                                static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = std::abs(tau(idx[j]));
    }
    return out;
  };

  const CMatrix g_neg = g_ * columns(neg);
  const CMatrix t_neg = magnitudes(neg);
  const HermitianOperator c =
      neg.empty() ? a_ : HermitianOperator(a_.entries() - g_neg * t_neg * g_neg.adjoint());

  PairSplit out;
  if (!neg.empty()) out.c_to_a.emplace(c, g_neg, t_neg);
  if (!pos.empty()) out.c_to_b.emplace(c, CMatrix(g_ * columns(pos)), magnitudes(pos));
  return out;
}

CMatrix GammaField::operator()(cplx z) const { return gamma_eval(*pair_, z); }

CMatrix gamma_eval(const PerturbationPair& pair, cplx z) {
  return resolvent(pair.a_op(), z) * pair.g_map();
}

CMatrix weyl_eval(const PerturbationPair& pair, cplx z) {
  const CMatrix& g = pair.g_map();
  return pair.t_inverse() + g.adjoint() * resolvent(pair.a_op(), z) * g;
}

CMatrix weyl_derivative(const PerturbationPair& pair, cplx z, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "derivative order must be >= 1");
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) factorial *= j;
  const CMatrix& g = pair.g_map();
  return factorial * (g.adjoint() * resolvent_power(pair.a_op(), z, k + 1) * g);
}

double krein_residual(const PerturbationPair& pair, cplx z) {
  if (!pair.regular_point(z)) {
    throw Error(ErrorKind::SpectrumHit, describe_point(z) + " lies in sigma(A) or sigma(B)");
  }
  const CMatrix ra = resolvent(pair.a_op(), z);
  const CMatrix rb = resolvent(pair.b_op(), z);
  const CMatrix m = weyl_eval(pair, z);
  if (smallest_singular_value(m) <= 1e-12 * std::max(1.0, operator_norm(m))) {
    throw Error(ErrorKind::SingularWeyl, "M(z) is numerically singular at " + describe_point(z));
  }
  const CMatrix gamma = ra * pair.g_map();
  const CMatrix gamma_adj_conj = pair.g_map().adjoint() * ra;  // gamma(conj z)*
  const CMatrix correction = gamma * m.partialPivLu().solve(gamma_adj_conj);
  return operator_norm(rb - ra + correction);
}

double krein_tolerance(const PerturbationPair& pair, cplx z) {
  const double ra = operator_norm(resolvent(pair.a_op(), z));
  const double g = operator_norm(pair.g_map());
  return 1e-10 * (1.0 + ra * ra * g * g);
}

}  // namespace ssf
