#pragma once

#include <optional>
#include <utility>

#include "ssf/nevlog.hpp"
#include "ssf/opcore.hpp"

namespace ssf {

struct PairSplit;

/// The pair {A, B} with B = A + G T G*, G injective (n x d), T Hermitian and
/// invertible (d x d). The Weyl function is fixed as
///   M(z) = T^{-1} + G* (A - z)^{-1} G,
/// and the gamma field as gamma(z) = (A - z)^{-1} G.
class PerturbationPair {
 public:
  PerturbationPair(HermitianOperator a, CMatrix g, CMatrix t,
                   std::optional<double> sign_checkpoint = std::nullopt);

  Eigen::Index n() const noexcept { return g_.rows(); }
  Eigen::Index d() const noexcept { return g_.cols(); }

  const HermitianOperator& a_op() const noexcept { return a_; }
  const HermitianOperator& b_op() const noexcept { return b_; }
  const CMatrix& g_map() const noexcept { return g_; }
  const CMatrix& t_coupling() const noexcept { return t_; }
  const CMatrix& t_inverse() const noexcept { return t_inv_; }
  std::optional<double> sign_checkpoint() const noexcept { return zeta0_; }

  // T positive definite: the sign condition (A - z0)^{-1} >= (B - z0)^{-1}
  // holds below the joint spectrum.
  bool coupling_positive() const noexcept { return coupling_positive_; }

  double spectral_min() const;
  double spectral_max() const;

  // z avoids sigma(A) and sigma(B) by more than 1e-12.
  bool regular_point(cplx z) const;

  /// M as a Nevanlinna evaluator. When a sign checkpoint is present, the
  /// evaluator is continued to the gap of sigma(A) that contains it.
  NevanlinnaEvaluator weyl_function() const;

  /// Splits an indefinite coupling T = T+ - T- through the common operator
  /// C = A - G T- G*. Returns the pairs {C, A} and {C, B}, both with positive
  /// coupling; a side with no spectral part is returned empty.
  PairSplit split_through_common() const;

 private:
  HermitianOperator a_;
  CMatrix g_;
  CMatrix t_;
  CMatrix t_inv_;
  HermitianOperator b_;
  std::optional<double> zeta0_;
  bool coupling_positive_ = false;
};

struct PairSplit {
  std::optional<PerturbationPair> c_to_a;
  std::optional<PerturbationPair> c_to_b;
};

/// gamma(z) = (A - z)^{-1} G, with gamma(conj z)* = G* (A - z)^{-1}.
class GammaField {
 public:
  explicit GammaField(const PerturbationPair& pair) : pair_(&pair) {}
  CMatrix operator()(cplx z) const;

 private:
  const PerturbationPair* pair_;
};

CMatrix gamma_eval(const PerturbationPair& pair, cplx z);

CMatrix weyl_eval(const PerturbationPair& pair, cplx z);

/// k-th derivative of M: k! G* (A - z)^{-(k+1)} G.
CMatrix weyl_derivative(const PerturbationPair& pair, cplx z, int k);

/// Operator norm of (B - z)^{-1} - (A - z)^{-1} + gamma(z) M(z)^{-1} gamma(conj z)*.
double krein_residual(const PerturbationPair& pair, cplx z);

/// The scale-aware tolerance 1e-10 (1 + |(A - z)^{-1}|^2 |G|^2) that every
/// Krein residual must respect.
double krein_tolerance(const PerturbationPair& pair, cplx z);

}  // namespace ssf
