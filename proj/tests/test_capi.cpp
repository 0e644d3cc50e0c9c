#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "ssf.h"

TEST_SUITE("capi") {
  TEST_CASE("pair handle round trip") {
    const double a[] = {0.0, 0.0};
    const double g[] = {1.0, 0.0};
    const double t[] = {1.0, 0.0};
    ssf_pair* pair = nullptr;
    REQUIRE(ssf_pair_create(1, 1, a, g, t, nullptr, &pair) == SSF_OK);
    double m[2];
    REQUIRE(ssf_pair_weyl(pair, 0.0, 1.0, m) == SSF_OK);
    CHECK(m[0] == doctest::Approx(1.0));
    CHECK(m[1] == doctest::Approx(1.0));
    double res = 1.0, tol = 0.0;
    REQUIRE(ssf_pair_krein_residual(pair, 0.0, 1.0, &res, &tol) == SSF_OK);
    CHECK(res <= 1e-14);
    long count = 0;
    REQUIRE(ssf_pair_counting_oracle(pair, 0.5, &count) == SSF_OK);
    CHECK(count == 1);

    ssf_run_config cfg;
    ssf_run_config_init(&cfg);
    ssf_grid* grid = nullptr;
    REQUIRE(ssf_pair_ssf(pair, &cfg, &grid) == SSF_OK);
    CHECK(ssf_grid_size(grid) >= 301);
    std::vector<double> lambda(ssf_grid_size(grid)), xi(ssf_grid_size(grid));
    REQUIRE(ssf_grid_copy(grid, lambda.data(), xi.data(), nullptr) == SSF_OK);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      if (lambda[i] > 0.05 && lambda[i] < 0.95) CHECK(std::abs(xi[i] - 1.0) < 1e-3);
    }
    CHECK(ssf_grid_copy(grid, nullptr, nullptr, xi.data()) == SSF_ERR_INVALID_INPUT);
    ssf_grid_free(grid);
    ssf_pair_free(pair);
  }

  TEST_CASE("errors map to status codes") {
    const double a[] = {0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 0.0, 0.0};
    const double g[] = {1.0, 0.0, 0.0, 0.0};
    const double t[] = {1.0, 0.0};
    ssf_pair* pair = nullptr;
    CHECK(ssf_pair_create(2, 1, a, g, t, nullptr, &pair) == SSF_ERR_INVALID_INPUT);
    CHECK(pair == nullptr);
    CHECK(std::string(ssf_last_error()).find("Hermitian") != std::string::npos);
    CHECK(ssf_status_is_input_error(SSF_ERR_INVALID_INPUT));
    CHECK_FALSE(ssf_status_is_input_error(SSF_ERR_SPECTRUM_HIT));
    CHECK(std::string(ssf_status_name(SSF_ERR_SPECTRUM_HIT)) == "SpectrumHit");
    CHECK(ssf_pair_create(2, 1, nullptr, g, t, nullptr, &pair) == SSF_ERR_INVALID_INPUT);

    const double a1[] = {0.0, 0.0};
    REQUIRE(ssf_pair_create(1, 1, a1, g, t, nullptr, &pair) == SSF_OK);
    double m[2];
    CHECK(ssf_pair_weyl(pair, 0.0, 0.0, m) == SSF_ERR_SPECTRUM_HIT);
    ssf_pair_free(pair);
  }

  TEST_CASE("descriptor compute and verify") {
    ssf_descriptor* d = nullptr;
    REQUIRE(ssf_descriptor_parse(R"({"kind": "delta", "alpha": -2})", &d) == SSF_OK);
    CHECK(std::string(ssf_descriptor_kind(d)) == "delta");
    ssf_run_config cfg;
    ssf_run_config_init(&cfg);
    cfg.grid_min = 0.01;
    cfg.grid_max = 25.0;
    ssf_grid* grid = nullptr;
    REQUIRE(ssf_compute(d, &cfg, &grid) == SSF_OK);
    CHECK(ssf_grid_has_oracle(grid));
    const std::size_t n = ssf_grid_size(grid);
    std::vector<double> lambda(n), xi(n);
    ssf_grid_copy(grid, lambda.data(), xi.data(), nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(xi[i] - std::atan(1.0 / std::sqrt(lambda[i])) / M_PI) < 1e-6);
    }
    ssf_grid_free(grid);

    ssf_report* report = nullptr;
    REQUIRE(ssf_verify(d, &cfg, &report) == SSF_OK);
    CHECK(ssf_report_passed(report));
    CHECK(ssf_report_suite_count(report) > 0);
    const char* name = nullptr;
    const char* status = nullptr;
    REQUIRE(ssf_report_suite(report, 0, &name, &status, nullptr) == SSF_OK);
    CHECK(std::string(status) == "pass");
    CHECK(ssf_report_suite(report, 999, &name, &status, nullptr) == SSF_ERR_INVALID_INPUT);
    ssf_report_free(report);
    ssf_descriptor_free(d);

    CHECK(ssf_descriptor_load("/nonexistent/descriptor.json", &d) == SSF_ERR_INVALID_INPUT);
  }
}
