#include "ssf/spectral_shift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ssf/errors.hpp"
#include "ssf/quadrature.hpp"

namespace ssf {

namespace {

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidInput, "lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw Error(ErrorKind::InvalidInput, "lambda grid is not finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::InvalidInput, "lambda grid must be strictly increasing");
    }
  }
}

void validate_power(int power) {
  if (power < 1 || power % 2 == 0) {
    throw Error(ErrorKind::InvalidInput, "power must be an odd positive integer");
  }
}

// int_b^inf max(t - x, |y|)^{-m-1} dt for b measured as distance d = b - x.
double one_sided_tail(double d, double y, int power) {
  const double ay = std::abs(y);
  if (d >= ay) return std::pow(d, -power) / power;
  return (ay - d) * std::pow(ay, -power - 1) + std::pow(ay, -power) / power;
}

}  // namespace

double SsfGrid::interpolate(double x) const {
  if (lambda.empty() || x < lambda.front() || x > lambda.back()) return 0.0;
  const auto it = std::upper_bound(lambda.begin(), lambda.end(), x);
  if (it == lambda.end()) return xi.back();
  const auto hi = static_cast<std::size_t>(it - lambda.begin());
  if (hi == 0) return xi.front();
  const std::size_t lo = hi - 1;
  const double w = (x - lambda[lo]) / (lambda[hi] - lambda[lo]);
  return (1.0 - w) * xi[lo] + w * xi[hi];
}

SsfGrid sample_ssf(const std::function<BoundaryValue(double)>& point, std::span<const double> grid,
                   const EpsilonSchedule& sched, const SsfOptions& opts) {
  validate_grid(grid);
  validate_power(opts.power);
  sched.validate();

  std::map<double, BoundaryValue> samples;
  for (double lambda : grid) samples.emplace(lambda, point(lambda));

  if (opts.refine_jumps) {
    // Each pass bisects every coarse jump; a step hiding two jumps is caught
    // on the following pass. A jump split by a sample landing on it shows up
    // as two same-signed steps whose sum crosses the threshold.
    const double thr = opts.jump_threshold;
    for (int pass = 0; pass < 16; ++pass) {
      std::vector<double> x, dv;
      for (auto it = samples.begin(); std::next(it) != samples.end(); ++it) {
        x.push_back(it->first);
        dv.push_back(std::next(it)->second.value - it->second.value);
      }
      x.push_back(samples.rbegin()->first);
      std::vector<std::pair<double, double>> brackets;
      for (std::size_t i = 0; i < dv.size(); ++i) {
        if (x[i + 1] - x[i] <= opts.refine_width) continue;
        bool jump = std::abs(dv[i]) > thr;
        if (!jump && std::abs(dv[i]) > 0.25 * thr) {
          for (std::size_t j : {i - 1, i + 1}) {
            if (j < dv.size() && dv[j] * dv[i] > 0.0 && std::abs(dv[i] + dv[j]) > thr) jump = true;
          }
        }
        if (jump) brackets.emplace_back(x[i], x[i + 1]);
      }
      if (brackets.empty()) break;
      for (auto [a, b] : brackets) {
        double fa = samples.at(a).value;
        double fb = samples.at(b).value;
        while (b - a > opts.refine_width) {
          const double mid = 0.5 * (a + b);
          const BoundaryValue v = point(mid);
          samples.emplace(mid, v);
          if (std::abs(v.value - fa) >= std::abs(fb - v.value)) {
            b = mid, fb = v.value;
          } else {
            a = mid, fa = v.value;
          }
        }
      }
    }
  }

  SsfGrid out;
  out.eps_schedule = sched;
  out.power = opts.power;
  out.basis_seed = opts.basis_seed;
  out.lambda.reserve(samples.size());
  out.xi.reserve(samples.size());
  for (const auto& [lambda, bv] : samples) {
    out.lambda.push_back(lambda);
    out.xi.push_back(bv.value);
    out.unstable_points += bv.unstable ? 1 : 0;
  }
  return out;
}

SsfGrid ssf_boundary_limit(const NevanlinnaEvaluator& m, std::span<const double> grid,
                           const EpsilonSchedule& sched, const SsfOptions& opts) {
  if (opts.basis != nullptr && (opts.basis->rows() != m.boundary_dim() ||
                                opts.basis->cols() != m.boundary_dim())) {
    throw Error(ErrorKind::InvalidInput, "trace basis has the wrong size");
  }
  return sample_ssf(
      [&](double lambda) { return im_log_trace_limit(m, lambda, sched, opts.log, opts.basis); },
      grid, sched, opts);
}

long ssf_counting_oracle(const HermitianOperator& a, const HermitianOperator& b, double lambda) {
  return static_cast<long>(counting_function(a, lambda)) -
         static_cast<long>(counting_function(b, lambda));
}

SsfGrid pair_ssf(const PerturbationPair& pair, std::span<const double> grid,
                 const EpsilonSchedule& sched, const SsfOptions& opts) {
  if (pair.coupling_positive()) return ssf_boundary_limit(pair.weyl_function(), grid, sched, opts);

  const PairSplit split = pair.split_through_common();
  std::optional<NevanlinnaEvaluator> m_a, m_b;
  if (split.c_to_a) m_a.emplace(split.c_to_a->weyl_function());
  if (split.c_to_b) m_b.emplace(split.c_to_b->weyl_function());
  auto point = [&](double lambda) {
    BoundaryValue out;
    if (m_b) {
      const auto v = im_log_trace_limit(*m_b, lambda, sched, opts.log);
      out.value += v.value;
      out.unstable = out.unstable || v.unstable;
    }
    if (m_a) {
      const auto v = im_log_trace_limit(*m_a, lambda, sched, opts.log);
      out.value -= v.value;
      out.unstable = out.unstable || v.unstable;
    }
    return out;
  };
  return sample_ssf(point, grid, sched, opts);
}

double TraceFormulaEntry::relative_residual() const {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-14});
  return residual / scale;
}

double TraceFormulaReport::max_relative_residual() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.relative_residual());
  return worst;
}

cplx trace_formula_rhs(const SsfGrid& ssf, cplx z, int power) {
  validate_power(power);
  if (ssf.size() < 2) return 0.0;
  auto integrand = [&](double t) -> cplx {
    return ssf.interpolate(t) * std::pow(cplx(t) - z, -power - 1);
  };
  const int max_panels = std::max<int>(4000, 4 * static_cast<int>(ssf.size()));
  const auto res = quad::gauss_kronrod(integrand, ssf.lambda, 1e-13, 1e-11, max_panels);
  if (!res.converged) {
    std::ostringstream os;
    os << "trace integral did not converge (error " << res.error << ")";
    throw Error(ErrorKind::QuadratureFailure, os.str());
  }
  return -static_cast<double>(power) * res.value;
}

double trace_formula_tail(const SsfGrid& ssf, cplx z, int power) {
  validate_power(power);
  if (ssf.lambda.empty()) return 0.0;
  const double left = std::abs(ssf.xi.front()) *
                      one_sided_tail(z.real() - ssf.lambda.front(), z.imag(), power);
  const double right = std::abs(ssf.xi.back()) *
                       one_sided_tail(ssf.lambda.back() - z.real(), z.imag(), power);
  return power * (left + right);
}

TraceFormulaEntry trace_formula_residual(const PerturbationPair& pair, const SsfGrid& ssf, cplx z,
                                         double tail_bound) {
  validate_power(ssf.power);
  if (!pair.regular_point(z)) {
    throw Error(ErrorKind::SpectrumHit, "trace formula evaluated on the spectrum");
  }
  constexpr double kMargin = 1.0;
  if (ssf.lambda.empty() || ssf.lambda.front() > pair.spectral_min() - kMargin ||
      ssf.lambda.back() < pair.spectral_max() + kMargin) {
    throw Error(ErrorKind::TailTooFat, "grid does not cover the joint spectrum with margin 1");
  }
  TraceFormulaEntry e;
  e.z = z;
  e.tail_estimate = trace_formula_tail(ssf, z, ssf.power);
  if (e.tail_estimate > tail_bound) {
    std::ostringstream os;
    os << "tail estimate " << e.tail_estimate << " exceeds bound " << tail_bound;
    throw Error(ErrorKind::TailTooFat, os.str());
  }
  e.lhs = (resolvent_power(pair.b_op(), z, ssf.power) - resolvent_power(pair.a_op(), z, ssf.power))
              .trace();
  e.rhs = trace_formula_rhs(ssf, z, ssf.power);
  e.residual = std::abs(e.lhs - e.rhs);
  return e;
}

SsfGrid ssf_difference(const SsfGrid& xi_b, const SsfGrid& xi_a) {
  if (xi_b.lambda != xi_a.lambda) {
    throw Error(ErrorKind::GridMismatch, "SSF grids have different lambda samples");
  }
  if (xi_b.power != xi_a.power) {
    throw Error(ErrorKind::GridMismatch, "SSF grids were built for different powers");
  }
  SsfGrid out = xi_b;
  for (std::size_t i = 0; i < out.xi.size(); ++i) out.xi[i] = xi_b.xi[i] - xi_a.xi[i];
  if (xi_b.has_oracle() && xi_a.has_oracle()) {
    for (std::size_t i = 0; i < out.xi.size(); ++i) {
      out.xi_oracle[i] = xi_b.xi_oracle[i] - xi_a.xi_oracle[i];
    }
  } else {
    out.xi_oracle.clear();
  }
  out.unstable_points = xi_b.unstable_points + xi_a.unstable_points;
  return out;
}

std::vector<double> grid_with_spectrum(std::span<const double> base, const PerturbationPair& pair,
                                       double offset) {
  validate_grid(base);
  std::vector<double> out(base.begin(), base.end());
  for (const HermitianOperator* op : {&pair.a_op(), &pair.b_op()}) {
    for (Eigen::Index i = 0; i < op->eigenvalues().size(); ++i) {
      for (double x : {op->eigenvalues()(i) - offset, op->eigenvalues()(i) + offset}) {
        if (x > base.front() && x < base.back()) out.push_back(x);
      }
    }
  }
  std::sort(out.begin(), out.end());
  // Drop near-duplicates so the grid stays strictly increasing.
  std::vector<double> merged;
  for (double x : out) {
    if (merged.empty() || x - merged.back() > 1e-9) merged.push_back(x);
  }
  if (merged.back() != base.back()) merged.push_back(base.back());
  return merged;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (!(lo < hi) || points < 2) {
    throw Error(ErrorKind::InvalidInput, "uniform grid needs lo < hi and at least 2 points");
  }
  std::vector<double> out(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

}  // namespace ssf
