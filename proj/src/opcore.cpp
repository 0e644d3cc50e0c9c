#include "ssf/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ssf/errors.hpp"

namespace ssf {

namespace {

std::string describe(cplx z) {
  std::ostringstream os;
  os.precision(12);
  os << "z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

HermitianOperator::HermitianOperator(const CMatrix& entries) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    throw Error(ErrorKind::InvalidInput, "operator matrix must be square with dim >= 1");
  }
  if (!entries.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "operator matrix has non-finite entries");
  }
  const double asym = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol) {
    std::ostringstream os;
    os << "matrix is not Hermitian (max |H - H*| = " << asym << ")";
    throw Error(ErrorKind::InvalidInput, os.str());
  }
  entries_ = (entries + entries.adjoint()) / 2.0;

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(entries_);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidInput, "Hermitian eigendecomposition did not converge");
  }
  // Eigen returns ascending eigenvalues with orthonormal eigenvectors.
  spectrum_.eigenvalues = solver.eigenvalues();
  spectrum_.eigenvectors = solver.eigenvectors();
}

HermitianOperator HermitianOperator::diagonal(std::initializer_list<double> values) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                            static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) m(i, i) = v, ++i;
  return HermitianOperator(m);
}

double HermitianOperator::spectral_distance(cplx z) const {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < spectrum_.eigenvalues.size(); ++i) {
    best = std::min(best, std::abs(z - spectrum_.eigenvalues(i)));
  }
  return best;
}

CMatrix resolvent(const HermitianOperator& h, cplx z) { return resolvent_power(h, z, 1); }

CMatrix resolvent_power(const HermitianOperator& h, cplx z, int power) {
  if (h.spectral_distance(z) <= kSpectrumTol) {
    throw Error(ErrorKind::SpectrumHit, describe(z) + " lies on the spectrum");
  }
  const auto& sd = h.spectrum();
  CVector d(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    d(i) = std::pow(cplx(sd.eigenvalues(i)) - z, -power);
  }
  return sd.eigenvectors * d.asDiagonal() * sd.eigenvectors.adjoint();
}

std::size_t counting_function(const HermitianOperator& h, double lambda) {
  const auto& ev = h.eigenvalues();
  return static_cast<std::size_t>(
      std::lower_bound(ev.data(), ev.data() + ev.size(), lambda) - ev.data());
}

CMatrix spectral_projector_negative(const HermitianOperator& k) {
  if (k.spectral_distance(0.0) <= kSpectrumTol) {
    throw Error(ErrorKind::SpectrumHit, "0 is an eigenvalue; the negative projector is undefined");
  }
  const auto& sd = k.spectrum();
  const auto count = static_cast<Eigen::Index>(counting_function(k, 0.0));
  const auto v = sd.eigenvectors.leftCols(count);
  return v * v.adjoint();
}

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

CMatrix imaginary_part(const CMatrix& m) { return (m - m.adjoint()) / cplx(0.0, 2.0); }

RVector hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double smallest_singular_value(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

}  // namespace ssf
