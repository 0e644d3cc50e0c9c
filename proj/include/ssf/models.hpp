#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ssf/nevlog.hpp"
#include "ssf/spectral_shift.hpp"

namespace ssf {

/// Real potential sampled on a uniform mesh of [lo, hi] and interpolated
/// linearly. A single sample is a constant; no samples is zero.
class MeshPotential {
 public:
  MeshPotential(double lo, double hi, std::vector<double> samples = {});

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  bool is_zero() const noexcept;
  double min_value() const noexcept;

  double operator()(double x) const;

  // Cell boundaries on which the potential is linear.
  std::vector<double> breakpoints() const;

 private:
  double lo_;
  double hi_;
  std::vector<double> samples_;
};

/// Values at x = hi of the solutions of -u'' + q u = z u with
/// u1(lo) = 1, u1'(lo) = 0 and u2(lo) = 0, u2'(lo) = 1.
struct FundamentalSystem {
  cplx u1, du1, u2, du2;
};

FundamentalSystem shoot(const MeshPotential& q, cplx z);

/// Pruefer angle at x = hi for real energy: theta' = cos^2 + (lambda - q) sin^2,
/// with u = r sin(theta), u' = r cos(theta).
double prufer_angle(const MeshPotential& q, double lambda, double theta0);

// ---------------------------------------------------------------------------
// Robin realizations on (0, L)

enum class RobinSide { Beta0 = 0, Beta1 = 1, Reference = 2 };

/// -u'' + a u on (0, L) with -u'(0) = beta[0] u(0), u'(L) = beta[1] u(L).
class RobinIntervalModel {
 public:
  RobinIntervalModel(double length, std::vector<double> potential, std::array<double, 2> beta0,
                     std::array<double, 2> beta1, double beta_ref);

  double length() const noexcept { return potential_.hi(); }
  const MeshPotential& potential() const noexcept { return potential_; }
  const std::array<double, 2>& beta(int p) const;
  double beta_ref() const noexcept { return beta_ref_; }
  std::array<double, 2> coefficients(RobinSide side) const;

 private:
  MeshPotential potential_;
  std::array<double, 2> beta0_;
  std::array<double, 2> beta1_;
  double beta_ref_;
};

/// Neumann-to-Dirichlet map (-u'(0), u'(L)) -> (u(0), u(L)).
CMatrix ntd_interval(const RobinIntervalModel& model, cplx z);

/// diag(beta - beta_p)^{-1} (beta_p N - I)(beta N - I)^{-1}, evaluated as
/// (beta - beta_p)^{-1} - N (beta N - I)^{-1} in a form that stays regular at
/// Neumann eigenvalues.
CMatrix robin_weyl(const RobinIntervalModel& model, int p, cplx z);

NevanlinnaEvaluator robin_weyl_evaluator(const RobinIntervalModel& model, int p);

/// Eigenvalue count strictly below lambda.
std::size_t robin_counting(const RobinIntervalModel& model, RobinSide side, double lambda);

/// Sorted eigenvalues <= lambda_max, each to 1e-9.
std::vector<double> robin_eigen_oracle(const RobinIntervalModel& model, RobinSide side,
                                       double lambda_max);

/// xi = (1/pi) tr Im(log M_1 - log M_0), with the counting difference
/// N(A_beta0) - N(A_beta1) attached as oracle.
SsfGrid robin_ssf(const RobinIntervalModel& model, std::span<const double> grid,
                  const EpsilonSchedule& sched, const SsfOptions& opts = {});

// ---------------------------------------------------------------------------
// Point interaction on the line

/// sqrt with Im > 0 off [0, inf); BranchViolation on [0, inf).
cplx sqrt_upper(cplx z);

/// i / (2 sqrt z).
cplx dtn_delta(cplx z);

class DeltaPointModel {
 public:
  explicit DeltaPointModel(double alpha, std::optional<double> comparison_c = std::nullopt);

  double alpha() const noexcept { return alpha_; }
  std::optional<double> comparison_c() const noexcept { return c_; }

 private:
  double alpha_;
  std::optional<double> c_;
};

enum class DeltaPath { Direct, Comparison };

/// E(z) - 1/alpha as a 1 x 1 evaluator.
NevanlinnaEvaluator delta_evaluator(const DeltaPointModel& model);

/// (c - alpha)^{-1} (alpha E - 1)(c E - 1)^{-1}.
cplx delta_comparison_weyl(const DeltaPointModel& model, cplx z);

/// -1 / (c (c E - 1)).
cplx delta_reference_weyl(const DeltaPointModel& model, cplx z);

/// arctan(|alpha| / (2 sqrt lambda)) / pi for lambda > 0, else 0 (alpha < 0).
double delta_closed_form(double alpha, double lambda);

SsfGrid delta_ssf(const DeltaPointModel& model, std::span<const double> grid,
                  const EpsilonSchedule& sched, DeltaPath path = DeltaPath::Direct,
                  const SsfOptions& opts = {});

// ---------------------------------------------------------------------------
// Line split at -R and R by Dirichlet conditions

class DecoupledLineModel {
 public:
  // Samples of V on a uniform mesh of [-R, R]; V vanishes outside.
  DecoupledLineModel(double cutoff_r, std::vector<double> potential);

  double cutoff() const noexcept { return potential_.hi(); }
  const MeshPotential& potential() const noexcept { return potential_; }
  MeshPotential interior(bool with_potential) const;

 private:
  MeshPotential potential_;
};

/// Interior Dirichlet-to-Neumann map (u(-R), u(R)) -> (-u'(-R), u'(R)).
CMatrix interior_dtn(const DecoupledLineModel& model, cplx z, bool with_potential);

/// (D_int(z) + D_ext(z))^{-1} with D_ext = -i sqrt(z) I. The boundary space
/// is C^2, so the identification between trace spaces is the identity.
CMatrix decouple_dtn(const DecoupledLineModel& model, cplx z, bool with_potential);

NevanlinnaEvaluator decouple_evaluator(const DecoupledLineModel& model, bool with_potential);

std::size_t dirichlet_counting(const DecoupledLineModel& model, bool with_potential,
                               double lambda);

std::vector<double> dirichlet_eigenvalues(const DecoupledLineModel& model, bool with_potential,
                                          double lambda_max);

/// xi = xi_A - xi_B + N(lambda, A+) - N(lambda, B+).
SsfGrid decoupled_ssf(const DecoupledLineModel& model, std::span<const double> grid,
                      const EpsilonSchedule& sched, const SsfOptions& opts = {});

}  // namespace ssf
