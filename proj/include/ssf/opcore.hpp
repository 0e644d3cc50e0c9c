#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>

#include <Eigen/Dense>

namespace ssf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kSpectrumTol = 1e-12;
inline constexpr double kEigenTol = 1e-10;

/// Eigenvalues in ascending order with a unitary matrix of eigenvectors
/// (one per column).
struct SpectralData {
  RVector eigenvalues;
  CMatrix eigenvectors;
};

/// Finite Hermitian matrix standing in for a self-adjoint operator.
///
/// Construction symmetrizes (H + H*)/2 when the asymmetry is below 1e-12 and
/// rejects the input otherwise. The spectral decomposition is computed once
/// and kept alongside the entries; the object is immutable afterwards.
class HermitianOperator {
 public:
  explicit HermitianOperator(const CMatrix& entries);

  static HermitianOperator diagonal(std::initializer_list<double> values);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const CMatrix& entries() const noexcept { return entries_; }
  const SpectralData& spectrum() const noexcept { return spectrum_; }
  const RVector& eigenvalues() const noexcept { return spectrum_.eigenvalues; }

  double min_eigenvalue() const { return spectrum_.eigenvalues(0); }
  double max_eigenvalue() const { return spectrum_.eigenvalues(spectrum_.eigenvalues.size() - 1); }

  // Distance from z to the nearest eigenvalue.
  double spectral_distance(cplx z) const;

 private:
  CMatrix entries_;
  SpectralData spectrum_;
};

/// (H - zI)^{-1}; throws SpectrumHit when z is within 1e-12 of an eigenvalue.
CMatrix resolvent(const HermitianOperator& h, cplx z);

/// (H - zI)^{-power} via the spectral decomposition.
CMatrix resolvent_power(const HermitianOperator& h, cplx z, int power);

/// Number of eigenvalues strictly below lambda, multiplicities counted.
std::size_t counting_function(const HermitianOperator& h, double lambda);

/// Orthogonal projector onto the spectral subspace of (-inf, 0).
CMatrix spectral_projector_negative(const HermitianOperator& k);

// Helpers shared across modules.
CMatrix hermitian_part(const CMatrix& m);
CMatrix imaginary_part(const CMatrix& m);  // (M - M*)/(2i)
RVector hermitian_eigenvalues(const CMatrix& m);
double operator_norm(const CMatrix& m);
double smallest_singular_value(const CMatrix& m);

}  // namespace ssf
