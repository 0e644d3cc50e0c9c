#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ssf/nevlog.hpp"
#include "ssf/triple.hpp"

namespace ssf {

/// Spectral shift function sampled on a strictly increasing lambda grid.
struct SsfGrid {
  std::vector<double> lambda;
  std::vector<double> xi;
  std::vector<double> xi_oracle;  // empty when no oracle was attached
  EpsilonSchedule eps_schedule;
  int power = 1;  // odd m = 2k + 1 used by the trace formula
  std::uint64_t basis_seed = 0;
  std::size_t unstable_points = 0;

  std::size_t size() const noexcept { return lambda.size(); }
  bool has_oracle() const noexcept { return xi_oracle.size() == lambda.size() && !lambda.empty(); }

  // Piecewise-linear interpolant; zero outside the grid's hull.
  double interpolate(double x) const;
};

struct SsfOptions {
  LogOptions log;
  int power = 1;
  // Adjacent samples differing by more than jump_threshold are bisected until
  // the bracket is narrower than refine_width.
  bool refine_jumps = true;
  double jump_threshold = 0.5;
  double refine_width = 1e-4;
  // Orthonormal basis for the trace (columns); null means coordinates.
  const CMatrix* basis = nullptr;
  std::uint64_t basis_seed = 0;
};

/// Evaluates a pointwise boundary value on the grid and refines detected
/// jumps. Shared by every SSF producer in the library.
SsfGrid sample_ssf(const std::function<BoundaryValue(double)>& point, std::span<const double> grid,
                   const EpsilonSchedule& sched, const SsfOptions& opts);

/// xi(lambda) = lim (1/pi) sum_j (Im log M(lambda + i eps) phi_j, phi_j).
SsfGrid ssf_boundary_limit(const NevanlinnaEvaluator& m, std::span<const double> grid,
                           const EpsilonSchedule& sched, const SsfOptions& opts = {});

/// N(lambda, A) - N(lambda, B): the exact a.e. SSF of a finite Hermitian pair
/// in the orientation fixed by the trace formula
///   tr((B - z)^{-m} - (A - z)^{-m}) = -m int xi(t) (t - z)^{-m-1} dt.
long ssf_counting_oracle(const HermitianOperator& a, const HermitianOperator& b, double lambda);

/// SSF of a pair regardless of the sign of T: the direct boundary limit when
/// T > 0, otherwise the difference xi_B - xi_A through the common operator.
SsfGrid pair_ssf(const PerturbationPair& pair, std::span<const double> grid,
                 const EpsilonSchedule& sched, const SsfOptions& opts = {});

struct TraceFormulaEntry {
  cplx z;
  cplx lhs;
  cplx rhs;
  double residual = 0.0;
  double tail_estimate = 0.0;

  double relative_residual() const;
};

struct TraceFormulaReport {
  std::vector<TraceFormulaEntry> entries;
  double max_relative_residual() const;
};

/// -m int xi(t) (t - z)^{-m-1} dt over the grid hull (piecewise-linear xi),
/// by adaptive Gauss-Kronrod on the grid segments.
cplx trace_formula_rhs(const SsfGrid& ssf, cplx z, int power);

/// Upper bound for m sup|xi_end| int_{outside hull} |t - z|^{-m-1} dt, with
/// the end values of the grid standing in for xi beyond it.
double trace_formula_tail(const SsfGrid& ssf, cplx z, int power);

/// Compares tr((B - z)^{-m} - (A - z)^{-m}) with the integral side. Throws
/// TailTooFat if the grid misses the spectrum (margin 1) or the tail
/// estimate exceeds tail_bound.
TraceFormulaEntry trace_formula_residual(const PerturbationPair& pair, const SsfGrid& ssf, cplx z,
                                         double tail_bound);

/// Pointwise xi_b - xi_a; the grids must share lambda and power.
SsfGrid ssf_difference(const SsfGrid& xi_b, const SsfGrid& xi_a);

/// base merged with mu +- offset for every eigenvalue mu of A and B inside the
/// hull of base, so each jump of a matrix SSF sits in its own short step.
std::vector<double> grid_with_spectrum(std::span<const double> base, const PerturbationPair& pair,
                                       double offset = 1e-3);

/// Uniform grid of `points` samples on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

}  // namespace ssf
