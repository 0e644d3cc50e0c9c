#include "ssf/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "ssf/errors.hpp"

namespace ssf {

namespace {

namespace odeint = boost::numeric::odeint;

constexpr double kPi = std::numbers::pi;
constexpr double kOdeAbsTol = 1e-12;
constexpr double kOdeRelTol = 1e-10;
// Eigenvalue roots sit on the Pruefer angle, so it is integrated tighter.
constexpr double kPruferAbsTol = 1e-14;
constexpr double kPruferRelTol = 1e-13;

// |u| below this at z counts as vanishing to integration accuracy.
double vanishing_tol(cplx z) { return 1e-9 * (1.0 + std::abs(z)); }

std::string describe(cplx z) {
  std::ostringstream os;
  os.precision(12);
  os << "z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, std::string(what) + " is not finite");
}

// Integrates cell by cell so the kinks of the potential fall on step ends.
template <class State, class Rhs>
void integrate_cells(const MeshPotential& q, const Rhs& rhs, State& state, cplx z,
                     double abs_tol = kOdeAbsTol, double rel_tol = kOdeRelTol) {
  const std::vector<double> cells = q.breakpoints();
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(abs_tol, rel_tol);
  try {
    for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
      const double a = cells[k];
      const double b = cells[k + 1];
      odeint::integrate_adaptive(stepper, rhs, state, a, b, (b - a) / 16.0);
    }
  } catch (const std::exception& e) {
    throw Error(ErrorKind::OdeSolveFailure, describe(z) + ": " + e.what());
  }
  for (double v : state) {
    if (!std::isfinite(v)) throw Error(ErrorKind::OdeSolveFailure, describe(z) + ": non-finite state");
  }
}

double im_log_trace(const CMatrix& m, const LogOptions& opts) {
  if (smallest_singular_value(m) <= 1e-12) {
    throw Error(ErrorKind::SingularValue, "boundary function is numerically singular");
  }
  return log_dissipative(DissipativeMatrix(m), opts).trace().imag() / kPi;
}

double im_log_scalar(cplx w, const LogOptions& opts) {
  if (std::abs(w) <= 1e-300) throw Error(ErrorKind::SingularValue, "boundary function vanishes");
  return log_cut(w, opts.branch).imag() / kPi;
}

std::size_t count_by_angle(double theta, double theta_target) {
  const double k = std::ceil((theta - theta_target) / kPi);
  return k > 0.0 ? static_cast<std::size_t>(k) : 0;
}

// Roots of theta(lambda) = theta_target + k pi, k = 0, 1, ..., below lambda_max.
std::vector<double> eigenvalues_by_angle(const MeshPotential& q, double theta0,
                                         double theta_target, double lambda_max,
                                         double lambda_floor) {
  require_finite(lambda_max, "lambda_max");
  auto theta = [&](double lambda) { return prufer_angle(q, lambda, theta0); };

  double lo = std::min(lambda_floor, lambda_max) - 1.0;
  for (int i = 0; count_by_angle(theta(lo), theta_target) > 0; ++i) {
    if (i > 60) throw Error(ErrorKind::RootFindingFailure, "no eigenvalue-free lower bound found");
    lo = 2.0 * lo - 1.0;
  }

  std::vector<double> out;
  const double theta_max = theta(lambda_max);
  for (std::size_t k = 0;; ++k) {
    const double target = theta_target + kPi * static_cast<double>(k);
    if (theta_max < target) break;
    const double a = out.empty() ? lo : out.back();
    const double fa = theta(a) - target;
    const double fb = theta_max - target;
    if (fb == 0.0) {
      out.push_back(lambda_max);
      continue;
    }
    if (!(fa < 0.0)) throw Error(ErrorKind::RootFindingFailure, "eigenvalue bracket lost its sign");
    std::uintmax_t iters = 200;
    const auto [r0, r1] = boost::math::tools::toms748_solve(
        [&](double lambda) { return theta(lambda) - target; }, a, lambda_max, fa, fb,
        [](double x, double y) { return std::abs(y - x) <= 2e-10; }, iters);
    if (iters >= 200) throw Error(ErrorKind::RootFindingFailure, "bracket exhausted");
    out.push_back(0.5 * (r0 + r1));
  }
  return out;
}

std::array<double, 2> checked_pair(std::array<double, 2> v, const char* what) {
  for (double x : v) require_finite(x, what);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

MeshPotential::MeshPotential(double lo, double hi, std::vector<double> samples)
    : lo_(lo), hi_(hi), samples_(std::move(samples)) {
  require_finite(lo_, "mesh start");
  require_finite(hi_, "mesh end");
  if (!(lo_ < hi_)) throw Error(ErrorKind::InvalidInput, "mesh interval must have lo < hi");
  for (double v : samples_) require_finite(v, "potential sample");
}

bool MeshPotential::is_zero() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return v == 0.0; });
}

double MeshPotential::min_value() const noexcept {
  return samples_.empty() ? 0.0 : *std::min_element(samples_.begin(), samples_.end());
}

double MeshPotential::operator()(double x) const {
  if (samples_.empty()) return 0.0;
  if (samples_.size() == 1) return samples_.front();
  const double h = (hi_ - lo_) / static_cast<double>(samples_.size() - 1);
  const double t = (x - lo_) / h;
  const auto k = static_cast<std::size_t>(
      std::clamp(std::floor(t), 0.0, static_cast<double>(samples_.size() - 2)));
  const double w = t - static_cast<double>(k);
  return (1.0 - w) * samples_[k] + w * samples_[k + 1];
}

std::vector<double> MeshPotential::breakpoints() const {
  if (samples_.size() < 2) return {lo_, hi_};
  const std::size_t cells = samples_.size() - 1;
  std::vector<double> out(cells + 1);
  const double h = (hi_ - lo_) / static_cast<double>(cells);
  for (std::size_t k = 0; k <= cells; ++k) out[k] = lo_ + h * static_cast<double>(k);
  out.back() = hi_;
  return out;
}

FundamentalSystem shoot(const MeshPotential& q, cplx z) {
  using State = std::array<double, 8>;
  // (u1, u1', u2, u2') as real/imaginary pairs.
  State s{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  auto rhs = [&](const State& y, State& dy, double x) {
    const cplx c = q(x) - z;
    for (int j = 0; j < 8; j += 4) {
      const cplx u(y[j], y[j + 1]);
      const cplx du = c * u;
      dy[j] = y[j + 2];
      dy[j + 1] = y[j + 3];
      dy[j + 2] = du.real();
      dy[j + 3] = du.imag();
    }
  };
  integrate_cells(q, rhs, s, z);
  return {{s[0], s[1]}, {s[2], s[3]}, {s[4], s[5]}, {s[6], s[7]}};
}

double prufer_angle(const MeshPotential& q, double lambda, double theta0) {
  using State = std::array<double, 1>;
  State s{theta0};
  auto rhs = [&](const State& y, State& dy, double x) {
    const double sn = std::sin(y[0]);
    const double cs = std::cos(y[0]);
    dy[0] = cs * cs + (lambda - q(x)) * sn * sn;
  };
  integrate_cells(q, rhs, s, cplx(lambda), kPruferAbsTol, kPruferRelTol);
  return s[0];
}

// ---------------------------------------------------------------------------
// Robin

RobinIntervalModel::RobinIntervalModel(double length, std::vector<double> potential,
                                       std::array<double, 2> beta0, std::array<double, 2> beta1,
                                       double beta_ref)
    : potential_(0.0, length, std::move(potential)),
      beta0_(checked_pair(beta0, "beta0")),
      beta1_(checked_pair(beta1, "beta1")),
      beta_ref_(beta_ref) {
  require_finite(beta_ref_, "beta_ref");
  for (const auto& b : {beta0_, beta1_}) {
    for (double v : b) {
      if (!(beta_ref_ - v > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "beta_ref must exceed every Robin coefficient");
      }
    }
  }
}

const std::array<double, 2>& RobinIntervalModel::beta(int p) const {
  if (p == 0) return beta0_;
  if (p == 1) return beta1_;
  throw Error(ErrorKind::InvalidInput, "Robin index must be 0 or 1");
}

std::array<double, 2> RobinIntervalModel::coefficients(RobinSide side) const {
  switch (side) {
    case RobinSide::Beta0: return beta0_;
    case RobinSide::Beta1: return beta1_;
    case RobinSide::Reference: return {beta_ref_, beta_ref_};
  }
  throw Error(ErrorKind::InvalidInput, "unknown Robin side");
}

namespace {

struct RobinFactors {
  CMatrix q;  // [[u2', 1], [1, u1]]
  FundamentalSystem fs;
};

RobinFactors robin_factors(const RobinIntervalModel& model, cplx z) {
  const FundamentalSystem fs = shoot(model.potential(), z);
  CMatrix q(2, 2);
  q << fs.du2, 1.0, 1.0, fs.u1;
  return {q, fs};
}

// With u1 u2' - u1' u2 = 1, det(beta Q - u1') = u1' g and
// Q adj(beta Q - u1') = u1' P, so N (beta N - I)^{-1} = P / g.
CMatrix robin_weyl_from(const RobinIntervalModel& model, const RobinFactors& f, int p, cplx z) {
  const double beta = model.beta_ref();
  const FundamentalSystem& fs = f.fs;
  const cplx g = beta * beta * fs.u2 - beta * (fs.u1 + fs.du2) + fs.du1;
  const double scale = std::max({1.0, std::abs(beta * beta * fs.u2), std::abs(beta * fs.u1),
                                 std::abs(beta * fs.du2), std::abs(fs.du1)});
  if (std::abs(g) <= 1e-12 * scale) {
    throw Error(ErrorKind::SingularFactor, "beta N(z) - I is singular at " + describe(z));
  }
  const auto& bp = model.beta(p);
  CMatrix out(2, 2);
  out << beta * fs.u2 - fs.du2, -1.0, -1.0, beta * fs.u2 - fs.u1;
  out /= -g;
  out(0, 0) += 1.0 / (beta - bp[0]);
  out(1, 1) += 1.0 / (beta - bp[1]);
  return out;
}

}  // namespace

CMatrix ntd_interval(const RobinIntervalModel& model, cplx z) {
  const RobinFactors f = robin_factors(model, z);
  if (std::abs(f.fs.du1) <= vanishing_tol(z)) {
    throw Error(ErrorKind::NeumannEigenvalueHit, describe(z) + " is a Neumann eigenvalue");
  }
  return f.q / f.fs.du1;
}

CMatrix robin_weyl(const RobinIntervalModel& model, int p, cplx z) {
  return robin_weyl_from(model, robin_factors(model, z), p, z);
}

NevanlinnaEvaluator robin_weyl_evaluator(const RobinIntervalModel& model, int p) {
  model.beta(p);
  return NevanlinnaEvaluator(2, [model, p](cplx z) { return robin_weyl(model, p, z); });
}

std::size_t robin_counting(const RobinIntervalModel& model, RobinSide side, double lambda) {
  require_finite(lambda, "lambda");
  const auto b = model.coefficients(side);
  const double theta0 = std::atan2(1.0, -b[0]);
  const double target = std::atan2(1.0, b[1]);
  return count_by_angle(prufer_angle(model.potential(), lambda, theta0), target);
}

std::vector<double> robin_eigen_oracle(const RobinIntervalModel& model, RobinSide side,
                                       double lambda_max) {
  const auto b = model.coefficients(side);
  const double floor = std::min(0.0, model.potential().min_value()) -
                       std::max({0.0, b[0], b[1]}) * std::max({0.0, b[0], b[1]}) - 1.0;
  return eigenvalues_by_angle(model.potential(), std::atan2(1.0, -b[0]), std::atan2(1.0, b[1]),
                              lambda_max, floor);
}

SsfGrid robin_ssf(const RobinIntervalModel& model, std::span<const double> grid,
                  const EpsilonSchedule& sched, const SsfOptions& opts) {
  auto point = [&](double lambda) {
    return boundary_limit(sched, [&](double eps) {
      const cplx z(lambda, eps);
      const RobinFactors f = robin_factors(model, z);
      return im_log_trace(robin_weyl_from(model, f, 1, z), opts.log) -
             im_log_trace(robin_weyl_from(model, f, 0, z), opts.log);
    });
  };
  SsfGrid out = sample_ssf(point, grid, sched, opts);
  out.xi_oracle.reserve(out.size());
  for (double lambda : out.lambda) {
    out.xi_oracle.push_back(static_cast<double>(robin_counting(model, RobinSide::Beta0, lambda)) -
                            static_cast<double>(robin_counting(model, RobinSide::Beta1, lambda)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Point interaction

cplx sqrt_upper(cplx z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) {
    throw Error(ErrorKind::BranchViolation, describe(z) + " lies on the cut [0, inf)");
  }
  cplx s = std::sqrt(z);
  if (s.imag() < 0.0) s = -s;
  return s;
}

cplx dtn_delta(cplx z) { return cplx(0.0, 1.0) / (2.0 * sqrt_upper(z)); }

DeltaPointModel::DeltaPointModel(double alpha, std::optional<double> comparison_c)
    : alpha_(alpha), c_(comparison_c) {
  require_finite(alpha_, "alpha");
  if (alpha_ == 0.0) throw Error(ErrorKind::InvalidInput, "alpha must be nonzero");
  if (c_) {
    require_finite(*c_, "comparison c");
    if (!(*c_ > 0.0) || !(*c_ > alpha_)) {
      throw Error(ErrorKind::InvalidInput, "comparison c must satisfy c > 0 and c > alpha");
    }
  }
}

NevanlinnaEvaluator delta_evaluator(const DeltaPointModel& model) {
  const double alpha = model.alpha();
  return NevanlinnaEvaluator(1, [alpha](cplx z) {
    CMatrix out(1, 1);
    out(0, 0) = dtn_delta(z) - 1.0 / alpha;
    return out;
  });
}

namespace {

double require_c(const DeltaPointModel& model) {
  if (!model.comparison_c()) {
    throw Error(ErrorKind::InvalidInput, "comparison path needs comparison_c");
  }
  return *model.comparison_c();
}

}  // namespace

cplx delta_comparison_weyl(const DeltaPointModel& model, cplx z) {
  const double c = require_c(model);
  const double alpha = model.alpha();
  const cplx e = dtn_delta(z);
  return (alpha * e - 1.0) / ((c - alpha) * (c * e - 1.0));
}

cplx delta_reference_weyl(const DeltaPointModel& model, cplx z) {
  const double c = require_c(model);
  return -1.0 / (c * (c * dtn_delta(z) - 1.0));
}

double delta_closed_form(double alpha, double lambda) {
  if (lambda <= 0.0) return 0.0;
  return std::atan(std::abs(alpha) / (2.0 * std::sqrt(lambda))) / kPi;
}

SsfGrid delta_ssf(const DeltaPointModel& model, std::span<const double> grid,
                  const EpsilonSchedule& sched, DeltaPath path, const SsfOptions& opts) {
  std::function<double(cplx)> sample;
  if (path == DeltaPath::Direct) {
    if (model.alpha() >= 0.0) {
      throw Error(ErrorKind::SignPathMismatch, "the direct path requires alpha < 0");
    }
    const double inv = 1.0 / model.alpha();
    sample = [inv, &opts](cplx z) { return im_log_scalar(dtn_delta(z) - inv, opts.log); };
  } else {
    require_c(model);
    sample = [&model, &opts](cplx z) {
      return im_log_scalar(delta_comparison_weyl(model, z), opts.log) -
             im_log_scalar(delta_reference_weyl(model, z), opts.log);
    };
  }
  auto point = [&](double lambda) {
    return boundary_limit(sched, [&](double eps) { return sample(cplx(lambda, eps)); });
  };
  SsfGrid out = sample_ssf(point, grid, sched, opts);
  if (model.alpha() < 0.0) {
    out.xi_oracle.reserve(out.size());
    for (double lambda : out.lambda) out.xi_oracle.push_back(delta_closed_form(model.alpha(), lambda));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decoupled line

DecoupledLineModel::DecoupledLineModel(double cutoff_r, std::vector<double> potential)
    : potential_(-cutoff_r, cutoff_r, std::move(potential)) {
  if (!(cutoff_r > 0.0)) throw Error(ErrorKind::InvalidInput, "cutoff R must be positive");
}

MeshPotential DecoupledLineModel::interior(bool with_potential) const {
  return with_potential ? potential_ : MeshPotential(potential_.lo(), potential_.hi());
}

CMatrix interior_dtn(const DecoupledLineModel& model, cplx z, bool with_potential) {
  const FundamentalSystem fs = shoot(model.interior(with_potential), z);
  if (std::abs(fs.u2) <= vanishing_tol(z)) {
    throw Error(ErrorKind::DirichletEigenvalueHit, describe(z) + " is a Dirichlet eigenvalue");
  }
  CMatrix out(2, 2);
  out << fs.u1, -1.0, -1.0, fs.du2;
  return out / fs.u2;
}

namespace {

CMatrix decouple_from(const FundamentalSystem& fs, cplx z) {
  if (z.imag() == 0.0 && std::abs(fs.u2) <= vanishing_tol(z)) {
    throw Error(ErrorKind::DirichletEigenvalueHit, describe(z) + " is a Dirichlet eigenvalue");
  }
  const cplx s = cplx(0.0, -1.0) * sqrt_upper(z);
  // D_int + s I = K / u2, so the inverse is u2 K^{-1}.
  CMatrix k(2, 2);
  k << fs.u1 + s * fs.u2, -1.0, -1.0, fs.du2 + s * fs.u2;
  if (smallest_singular_value(k) <= 1e-14 * std::max(1.0, operator_norm(k))) {
    throw Error(ErrorKind::SingularFactor, "D_int + D_ext is singular at " + describe(z));
  }
  return fs.u2 * k.partialPivLu().inverse();
}

}  // namespace

CMatrix decouple_dtn(const DecoupledLineModel& model, cplx z, bool with_potential) {
  sqrt_upper(z);
  return decouple_from(shoot(model.interior(with_potential), z), z);
}

NevanlinnaEvaluator decouple_evaluator(const DecoupledLineModel& model, bool with_potential) {
  return NevanlinnaEvaluator(
      2, [model, with_potential](cplx z) { return decouple_dtn(model, z, with_potential); });
}

std::size_t dirichlet_counting(const DecoupledLineModel& model, bool with_potential,
                               double lambda) {
  require_finite(lambda, "lambda");
  return count_by_angle(prufer_angle(model.interior(with_potential), lambda, 0.0), kPi);
}

std::vector<double> dirichlet_eigenvalues(const DecoupledLineModel& model, bool with_potential,
                                          double lambda_max) {
  const MeshPotential q = model.interior(with_potential);
  return eigenvalues_by_angle(q, 0.0, kPi, lambda_max, std::min(0.0, q.min_value()));
}

SsfGrid decoupled_ssf(const DecoupledLineModel& model, std::span<const double> grid,
                      const EpsilonSchedule& sched, const SsfOptions& opts) {
  const MeshPotential free = model.interior(false);
  const MeshPotential& with_v = model.potential();
  auto point = [&](double lambda) {
    BoundaryValue bv = boundary_limit(sched, [&](double eps) {
      const cplx z(lambda, eps);
      return im_log_trace(decouple_from(shoot(free, z), z), opts.log) -
             im_log_trace(decouple_from(shoot(with_v, z), z), opts.log);
    });
    bv.value += static_cast<double>(dirichlet_counting(model, false, lambda)) -
                static_cast<double>(dirichlet_counting(model, true, lambda));
    return bv;
  };
  return sample_ssf(point, grid, sched, opts);
}

}  // namespace ssf
