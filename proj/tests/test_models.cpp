#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ssf/models.hpp"
#include "support.hpp"

using namespace ssf;
using oracle::pi;

namespace {

RobinIntervalModel base_robin(double beta = 3.0) {
  return RobinIntervalModel(1.0, {0.0}, {0.0, 0.0}, {1.0, 1.0}, beta);
}

double min_distance(double x, const std::vector<double>& points) {
  double d = 1e300;
  for (double p : points) d = std::min(d, std::abs(x - p));
  return d;
}

}  // namespace

TEST_SUITE("models.ode") {
  TEST_CASE("shooting reproduces trigonometric solutions") {
    const MeshPotential zero(0.0, 2.0);
    for (cplx z : {cplx(4.0, 0.0), cplx(-1.0, 0.5), cplx(10.0, 2.0)}) {
      const FundamentalSystem fs = shoot(zero, z);
      const cplx k = std::sqrt(z);
      CHECK(std::abs(fs.u1 - std::cos(2.0 * k)) < 1e-8);
      CHECK(std::abs(fs.du1 + k * std::sin(2.0 * k)) < 1e-8 * std::abs(k));
      CHECK(std::abs(fs.u2 - std::sin(2.0 * k) / k) < 1e-8);
      CHECK(std::abs(fs.du2 - std::cos(2.0 * k)) < 1e-8);
      // Wronskian
      CHECK(std::abs(fs.u1 * fs.du2 - fs.du1 * fs.u2 - 1.0) < 1e-8);
    }
  }

  TEST_CASE("constant potential shifts the energy") {
    const MeshPotential q(0.0, 1.0, {2.0});
    const FundamentalSystem a = shoot(q, {5.0, 0.3});
    const FundamentalSystem b = shoot(MeshPotential(0.0, 1.0), {3.0, 0.3});
    CHECK(std::abs(a.u1 - b.u1) < 1e-9);
    CHECK(std::abs(a.du2 - b.du2) < 1e-9);
  }

  TEST_CASE("Pruefer angle counts Dirichlet zeros") {
    const MeshPotential zero(0.0, 1.0);
    // Dirichlet eigenvalues of (0, 1) are (k pi)^2: the angle passes k pi.
    CHECK(std::floor(prufer_angle(zero, 5.0, 0.0) / pi) == 0);
    CHECK(std::floor(prufer_angle(zero, 20.0, 0.0) / pi) == 1);
    CHECK(std::floor(prufer_angle(zero, 50.0, 0.0) / pi) == 2);
  }

  TEST_CASE("mesh potential") {
    const MeshPotential v(-1.0, 1.0, {0.0, 2.0, 0.0});
    CHECK(v(0.0) == doctest::Approx(2.0));
    CHECK(v(0.5) == doctest::Approx(1.0));
    CHECK(v.min_value() == 0.0);
    CHECK_FALSE(v.is_zero());
    CHECK(MeshPotential(0.0, 1.0).is_zero());
  }
}

TEST_SUITE("models.robin") {
  TEST_CASE("NtD closed form at z = -1") {
    const CMatrix n = ntd_interval(base_robin(), -1.0);
    const double coth = std::cosh(1.0) / std::sinh(1.0), csch = 1.0 / std::sinh(1.0);
    CHECK(std::abs(n(0, 0) - coth) < 1e-9);
    CHECK(std::abs(n(1, 1) - coth) < 1e-9);
    CHECK(std::abs(n(0, 1) - csch) < 1e-9);
    CHECK(std::abs(n(1, 0) - csch) < 1e-9);
    CHECK((std::cosh(1.0) - 1.0) / std::sinh(1.0) > 0.0);
    const auto ev = oracle::jacobi_eigenvalues(n);
    CHECK(ev[0] == doctest::Approx((std::cosh(1.0) - 1.0) / std::sinh(1.0)).epsilon(1e-8));
    CHECK(ev[1] == doctest::Approx((std::cosh(1.0) + 1.0) / std::sinh(1.0)).epsilon(1e-8));
  }

  TEST_CASE("NtD agrees with the inverse closed-form DtN and reflects") {
    const auto model = base_robin();
    for (cplx z : {cplx(2.0, 0.4), cplx(-3.0, 1.0), cplx(30.0, 0.1)}) {
      const CMatrix n = ntd_interval(model, z);
      CHECK((n - oracle::free_dtn(1.0, z).inverse()).norm() < 1e-8 * n.norm());
      CHECK((ntd_interval(model, std::conj(z)) - n.adjoint()).norm() < 1e-10 * n.norm());
    }
    CHECK(error_kind([&] { ntd_interval(model, pi * pi); }) == ErrorKind::NeumannEigenvalueHit);
  }

  TEST_CASE("Robin Weyl function against the closed form") {
    const RobinIntervalModel model(1.0, {0.0}, {0.0, 0.0}, {1.0, 1.0}, 2.0);
    const CMatrix n = oracle::free_dtn(1.0, -1.0).inverse();
    const CMatrix id = CMatrix::Identity(2, 2);
    const CMatrix expected = (n - id) * (2.0 * n - id).inverse();
    CHECK((robin_weyl(model, 1, -1.0) - expected).norm() < 1e-8);

    // Symmetric form at an arbitrary point and for unequal coefficients.
    const RobinIntervalModel m2(1.0, {0.0}, {0.5, -1.0}, {1.0, 1.0}, 3.0);
    const cplx z(4.0, 0.7);
    const CMatrix nz = oracle::free_dtn(1.0, z).inverse();
    CMatrix inv_gap = CMatrix::Zero(2, 2);
    inv_gap(0, 0) = 1.0 / (3.0 - 0.5);
    inv_gap(1, 1) = 1.0 / (3.0 + 1.0);
    const CMatrix sym = inv_gap - nz * (3.0 * nz - id).inverse();
    CHECK((robin_weyl(m2, 0, z) - sym).norm() < 1e-8);
  }

  TEST_CASE("Robin Weyl function stays regular at Neumann eigenvalues") {
    const auto model = base_robin();
    for (int p : {0, 1}) {
      const CMatrix m = robin_weyl(model, p, {pi * pi, 1e-6});
      CHECK(hermitian_eigenvalues(imaginary_part(m)).minCoeff() >= -1e-12);
    }
  }

  TEST_CASE("reference coefficient must dominate") {
    CHECK(error_kind([] { RobinIntervalModel(1.0, {0.0}, {0.0, 0.0}, {3.0, 1.0}, 3.0); }) ==
          ErrorKind::InvalidInput);
    CHECK(error_kind([] { RobinIntervalModel(-1.0, {0.0}, {0.0, 0.0}, {1.0, 1.0}, 3.0); }) ==
          ErrorKind::InvalidInput);
  }

  TEST_CASE("eigenvalue oracle") {
    const auto model = base_robin();
    const auto neumann = robin_eigen_oracle(model, RobinSide::Beta0, 40.0);
    REQUIRE(neumann.size() == 3);
    CHECK(std::abs(neumann[0]) < 1e-8);
    CHECK(std::abs(neumann[1] - pi * pi) < 1e-8);
    CHECK(std::abs(neumann[2] - 4 * pi * pi) < 1e-8);
    CHECK(robin_counting(model, RobinSide::Beta0, 10.0) == 2);

    for (auto side : {RobinSide::Beta1, RobinSide::Reference}) {
      const auto c = model.coefficients(side);
      const auto ref = oracle::robin_free_eigenvalues(1.0, c[0], c[1], -30.0, 200.0);
      const auto got = robin_eigen_oracle(model, side, 200.0);
      REQUIRE(got.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-7);
    }
  }

  TEST_CASE("eigenvalues decrease as coefficients increase") {
    const RobinIntervalModel model(1.0, {0.0, 1.0, -2.0}, {0.0, 0.0}, {0.5, 1.5}, 4.0);
    const auto lo = robin_eigen_oracle(model, RobinSide::Beta0, 100.0);
    const auto hi = robin_eigen_oracle(model, RobinSide::Beta1, 100.0);
    REQUIRE(hi.size() >= lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) CHECK(hi[i] <= lo[i] + 1e-9);
  }

  TEST_CASE("Robin SSF") {
    const auto model = base_robin();
    const auto grid = uniform_grid(-12.0, 45.0, 571);
    const SsfGrid xi = robin_ssf(model, grid, EpsilonSchedule{});
    REQUIRE(xi.has_oracle());
    std::vector<double> eig = robin_eigen_oracle(model, RobinSide::Beta0, 50.0);
    for (double e : robin_eigen_oracle(model, RobinSide::Beta1, 50.0)) eig.push_back(e);
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (min_distance(xi.lambda[i], eig) < 0.05) continue;
      CHECK(std::abs(xi.xi[i] - xi.xi_oracle[i]) < 1e-2);
    }
    const double floor = robin_eigen_oracle(model, RobinSide::Reference, 0.0).front() - 0.1;
    for (std::size_t i = 0; i < xi.size() && xi.lambda[i] < floor; ++i) CHECK(std::abs(xi.xi[i]) < 1e-4);

    const RobinIntervalModel same(1.0, {0.0}, {1.0, 1.0}, {1.0, 1.0}, 3.0);
    for (double v : robin_ssf(same, uniform_grid(-5.0, 30.0, 71), EpsilonSchedule{}).xi) CHECK(std::abs(v) < 1e-9);
  }
}

TEST_SUITE("models.delta") {
  TEST_CASE("DtN of the line") {
    CHECK(std::abs(dtn_delta(-1.0) - 0.5) < 1e-15);
    CHECK(std::abs(dtn_delta(-4.0) - 0.25) < 1e-15);
    CHECK(std::abs(dtn_delta({1.0, 1e-8}) - cplx(0.0, 0.5)) < 1e-7);
    CHECK(error_kind([] { dtn_delta(2.0); }) == ErrorKind::BranchViolation);
    CHECK(error_kind([] { sqrt_upper(0.0); }) == ErrorKind::BranchViolation);
    CHECK(sqrt_upper({-1.0, 1e-3}).imag() > 0.0);
    CHECK(sqrt_upper({-1.0, -1e-3}).imag() > 0.0);
  }

  TEST_CASE("attractive point interaction") {
    const DeltaPointModel model(-2.0);
    const auto grid = std::vector<double>{-1.0, 1.0, 4.0};
    const SsfGrid xi = delta_ssf(model, grid, EpsilonSchedule{});
    CHECK(std::abs(xi.xi[0]) < 1e-9);
    CHECK(std::abs(xi.xi[1] - 0.25) < 1e-6);
    CHECK(std::abs(xi.xi[2] - std::atan(0.5) / pi) < 1e-6);
    // Near the threshold the schedule has to sit well below lambda.
    const SsfGrid near = delta_ssf(model, std::vector<double>{1e-8}, EpsilonSchedule{{1e-11, 1e-12, 1e-13}, 1});
    CHECK(std::abs(near.xi[0] - 0.5) < 1e-4);
  }

  TEST_CASE("comparison path agrees") {
    const DeltaPointModel model(-2.0, 1.0);
    const auto grid = uniform_grid(0.01, 25.0, 200);
    const SsfGrid a = delta_ssf(model, grid, EpsilonSchedule{}, DeltaPath::Direct);
    const SsfGrid b = delta_ssf(model, grid, EpsilonSchedule{}, DeltaPath::Comparison);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.xi[i] - b.xi[i]) < 1e-6);
  }

  TEST_CASE("validation and path checks") {
    CHECK(error_kind([] { DeltaPointModel(0.0); }) == ErrorKind::InvalidInput);
    CHECK(error_kind([] { DeltaPointModel(2.0, 1.0); }) == ErrorKind::InvalidInput);
    CHECK(error_kind([] { delta_ssf(DeltaPointModel(2.0), std::vector<double>{1.0}, EpsilonSchedule{}); }) ==
          ErrorKind::SignPathMismatch);
    CHECK(error_kind([] {
            delta_ssf(DeltaPointModel(-2.0), std::vector<double>{1.0}, EpsilonSchedule{}, DeltaPath::Comparison);
          }) == ErrorKind::InvalidInput);
  }
}

TEST_SUITE("models.decouple") {
  TEST_CASE("decoupled Neumann map with no potential") {
    const DecoupledLineModel model(1.0, {0.0});
    const cplx z(1.5, 0.3);
    CHECK((decouple_dtn(model, z, true) - decouple_dtn(model, z, false)).norm() == 0.0);

    // At z = -1 the exterior map is the identity.
    const CMatrix expected = (oracle::free_dtn(2.0, -1.0) + CMatrix::Identity(2, 2)).inverse();
    CHECK((decouple_dtn(model, -1.0, false) - expected).norm() < 1e-9);
    CHECK((decouple_dtn(model, std::conj(z), true) - decouple_dtn(model, z, true).adjoint()).norm() < 1e-10);
  }

  TEST_CASE("Dirichlet counting") {
    const DecoupledLineModel free(1.0, {0.0});
    CHECK(dirichlet_counting(free, true, 3.0) == 1);
    CHECK(dirichlet_counting(free, true, -1.0) == 0);

    const DecoupledLineModel well(1.0, {-5.0});
    const auto fd = oracle::fd_dirichlet(-1.0, 1.0, 4000, [](double) { return -5.0; });
    for (double lambda : {-4.0, -2.0, 0.0, 5.0, 20.0}) {
      CHECK(static_cast<long>(dirichlet_counting(well, true, lambda)) == fd.count(lambda));
    }
    const auto eig = dirichlet_eigenvalues(well, true, 30.0);
    for (std::size_t k = 0; k < eig.size(); ++k) {
      const double n = static_cast<double>(k + 1);
      CHECK(std::abs(eig[k] - (n * n * pi * pi / 4.0 - 5.0)) < 1e-7);
    }
  }

  TEST_CASE("decoupled SSF") {
    const DecoupledLineModel free(1.0, {0.0});
    for (double v : decoupled_ssf(free, uniform_grid(-2.0, 20.0, 111), EpsilonSchedule{}).xi) {
      CHECK(std::abs(v) < 1e-8);
    }
    const DecoupledLineModel well(1.0, {-1.0});
    const SsfGrid xi = decoupled_ssf(well, uniform_grid(-3.0, 10.0, 131), EpsilonSchedule{});
    for (std::size_t i = 0; i < xi.size() && xi.lambda[i] < -1.1; ++i) CHECK(std::abs(xi.xi[i]) < 1e-3);
  }
}
