#include "ssf.h"

#include <cstdio>
#include <exception>
#include <new>
#include <string>

#include "ssf/errors.hpp"
#include "ssf/io.hpp"
#include "ssf/verify.hpp"

struct ssf_descriptor {
  ssf::Descriptor value;
};

struct ssf_pair {
  ssf::PerturbationPair value;
};

struct ssf_grid {
  ssf::SsfGrid value;
};

struct ssf_report {
  ssf::VerifyReport value;
  std::vector<std::string> statuses;
};

namespace {

thread_local std::string last_error;

template <class F>
ssf_status guarded(F&& f) noexcept {
  try {
    f();
    last_error.clear();
    return SSF_OK;
  } catch (const ssf::Error& e) {
    last_error = e.what();
    return static_cast<ssf_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return SSF_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw ssf::Error(ssf::ErrorKind::InvalidInput, std::string(what) + " is null");
}

ssf::CMatrix read_matrix(const double* data, size_t rows, size_t cols) {
  ssf::CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) {
      const size_t k = 2 * (i * cols + j);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {data[k], data[k + 1]};
    }
  }
  return m;
}

ssf::RunConfig to_config(const ssf_run_config* c) {
  ssf::RunConfig cfg;
  if (c == nullptr) return cfg;
  cfg.grid_min = c->grid_min;
  cfg.grid_max = c->grid_max;
  cfg.grid_points = c->grid_points;
  cfg.eps_start = c->eps_start;
  cfg.eps_ratio = c->eps_ratio;
  cfg.eps_count = c->eps_count;
  cfg.eps_order = c->eps_order;
  cfg.power = c->power;
  cfg.basis_seed = c->basis_seed;
  switch (c->fault) {
    case SSF_FAULT_NONE: cfg.fault = ssf::Fault::None; break;
    case SSF_FAULT_FLIP_IM_SIGN: cfg.fault = ssf::Fault::FlipImSign; break;
    case SSF_FAULT_WRONG_BRANCH: cfg.fault = ssf::Fault::WrongBranch; break;
    default: throw ssf::Error(ssf::ErrorKind::InvalidInput, "unknown fault");
  }
  return cfg;
}

void emit(const std::string& text, const char* path) {
  if (path == nullptr) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
  } else {
    ssf::write_text_file(path, text);
  }
}

}  // namespace

extern "C" {

const char* ssf_last_error(void) { return last_error.c_str(); }

const char* ssf_status_name(ssf_status status) {
  if (status == SSF_OK) return "Ok";
  if (status == SSF_ERR_INTERNAL) return "Internal";
  if (status >= SSF_ERR_INVALID_INPUT && status <= SSF_ERR_SIGN_PATH_MISMATCH) {
    return ssf::error_kind_name(static_cast<ssf::ErrorKind>(static_cast<int>(status))).data();
  }
  return "Unknown";
}

int ssf_status_is_input_error(ssf_status status) { return status == SSF_ERR_INVALID_INPUT; }

void ssf_run_config_init(ssf_run_config* cfg) {
  if (cfg == nullptr) return;
  const ssf::RunConfig d;
  cfg->grid_min = d.grid_min;
  cfg->grid_max = d.grid_max;
  cfg->grid_points = d.grid_points;
  cfg->eps_start = d.eps_start;
  cfg->eps_ratio = d.eps_ratio;
  cfg->eps_count = d.eps_count;
  cfg->eps_order = d.eps_order;
  cfg->power = d.power;
  cfg->basis_seed = d.basis_seed;
  cfg->fault = SSF_FAULT_NONE;
}

ssf_status ssf_descriptor_load(const char* path, ssf_descriptor** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ssf_descriptor{ssf::load_descriptor(path)};
  });
}

ssf_status ssf_descriptor_parse(const char* text, ssf_descriptor** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new ssf_descriptor{ssf::parse_descriptor(text)};
  });
}

const char* ssf_descriptor_kind(const ssf_descriptor* desc) {
  return desc == nullptr ? "" : desc->value.kind.c_str();
}

void ssf_descriptor_free(ssf_descriptor* desc) { delete desc; }

ssf_status ssf_pair_create(size_t n, size_t d, const double* a, const double* g, const double* t,
                           const double* zeta0, ssf_pair** out) {
  return guarded([&] {
    require(a, "A");
    require(g, "G");
    require(t, "T");
    require(out, "out");
    if (n == 0 || d == 0) throw ssf::Error(ssf::ErrorKind::InvalidInput, "n and d must be positive");
    std::optional<double> z0;
    if (zeta0 != nullptr) z0 = *zeta0;
    *out = new ssf_pair{ssf::PerturbationPair(ssf::HermitianOperator(read_matrix(a, n, n)),
                                              read_matrix(g, n, d), read_matrix(t, d, d), z0)};
  });
}

void ssf_pair_free(ssf_pair* pair) { delete pair; }

ssf_status ssf_pair_weyl(const ssf_pair* pair, double re, double im, double* out) {
  return guarded([&] {
    require(pair, "pair");
    require(out, "out");
    const ssf::CMatrix m = ssf::weyl_eval(pair->value, {re, im});
    const auto d = m.rows();
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        out[2 * (i * d + j)] = m(i, j).real();
        out[2 * (i * d + j) + 1] = m(i, j).imag();
      }
    }
  });
}

ssf_status ssf_pair_krein_residual(const ssf_pair* pair, double re, double im, double* residual,
                                   double* tolerance) {
  return guarded([&] {
    require(pair, "pair");
    if (residual) *residual = ssf::krein_residual(pair->value, {re, im});
    if (tolerance) *tolerance = ssf::krein_tolerance(pair->value, {re, im});
  });
}

ssf_status ssf_pair_counting_oracle(const ssf_pair* pair, double lambda, long* out) {
  return guarded([&] {
    require(pair, "pair");
    require(out, "out");
    *out = ssf::ssf_counting_oracle(pair->value.a_op(), pair->value.b_op(), lambda);
  });
}

ssf_status ssf_pair_ssf(const ssf_pair* pair, const ssf_run_config* cfg, ssf_grid** out) {
  return guarded([&] {
    require(pair, "pair");
    require(out, "out");
    const ssf::RunConfig c = to_config(cfg);
    c.validate();
    ssf::SsfOptions opts;
    opts.power = c.power;
    opts.basis_seed = c.basis_seed;
    opts.log = c.log_options();
    *out = new ssf_grid{ssf::pair_ssf(pair->value, c.grid(), c.schedule(), opts)};
  });
}

ssf_status ssf_pair_trace_residual(const ssf_pair* pair, const ssf_grid* grid, double re, double im,
                                   double tail_bound, double* lhs, double* rhs, double* residual) {
  return guarded([&] {
    require(pair, "pair");
    require(grid, "grid");
    const auto e = ssf::trace_formula_residual(pair->value, grid->value, {re, im}, tail_bound);
    if (lhs) lhs[0] = e.lhs.real(), lhs[1] = e.lhs.imag();
    if (rhs) rhs[0] = e.rhs.real(), rhs[1] = e.rhs.imag();
    if (residual) *residual = e.residual;
  });
}

ssf_status ssf_compute(const ssf_descriptor* desc, const ssf_run_config* cfg, ssf_grid** out) {
  return guarded([&] {
    require(desc, "descriptor");
    require(out, "out");
    *out = new ssf_grid{ssf::compute_ssf(desc->value, to_config(cfg))};
  });
}

size_t ssf_grid_size(const ssf_grid* grid) { return grid == nullptr ? 0 : grid->value.size(); }

int ssf_grid_has_oracle(const ssf_grid* grid) {
  return grid != nullptr && grid->value.has_oracle() ? 1 : 0;
}

size_t ssf_grid_unstable_points(const ssf_grid* grid) {
  return grid == nullptr ? 0 : grid->value.unstable_points;
}

ssf_status ssf_grid_copy(const ssf_grid* grid, double* lambda, double* xi, double* xi_oracle) {
  return guarded([&] {
    require(grid, "grid");
    const auto& g = grid->value;
    if (xi_oracle != nullptr && !g.has_oracle()) {
      throw ssf::Error(ssf::ErrorKind::InvalidInput, "grid carries no oracle column");
    }
    for (size_t i = 0; i < g.size(); ++i) {
      if (lambda) lambda[i] = g.lambda[i];
      if (xi) xi[i] = g.xi[i];
      if (xi_oracle) xi_oracle[i] = g.xi_oracle[i];
    }
  });
}

ssf_status ssf_grid_write(const ssf_grid* grid, const ssf_descriptor* desc,
                          const ssf_run_config* cfg, ssf_format format, const char* path) {
  return guarded([&] {
    require(grid, "grid");
    if (format == SSF_FORMAT_CSV) {
      emit(ssf::format_csv(grid->value), path);
    } else if (format == SSF_FORMAT_JSON) {
      require(desc, "descriptor");
      emit(ssf::format_json(grid->value, desc->value, to_config(cfg)), path);
    } else {
      throw ssf::Error(ssf::ErrorKind::InvalidInput, "unknown output format");
    }
  });
}

ssf_status ssf_grid_write_svg(const ssf_grid* grid, const char* title, const char* path) {
  return guarded([&] {
    require(grid, "grid");
    emit(ssf::format_svg(grid->value, title ? title : "spectral shift function"), path);
  });
}

void ssf_grid_free(ssf_grid* grid) { delete grid; }

ssf_status ssf_verify(const ssf_descriptor* desc, const ssf_run_config* cfg, ssf_report** out) {
  return guarded([&] {
    require(desc, "descriptor");
    require(out, "out");
    auto* r = new ssf_report{ssf::run_verify(desc->value, to_config(cfg)), {}};
    for (const auto& s : r->value.suites) {
      r->statuses.push_back(s.status == ssf::SuiteStatus::Pass   ? "pass"
                            : s.status == ssf::SuiteStatus::Fail ? "fail"
                                                                 : "skipped");
    }
    *out = r;
  });
}

int ssf_report_passed(const ssf_report* report) {
  return report != nullptr && report->value.passed() ? 1 : 0;
}

size_t ssf_report_suite_count(const ssf_report* report) {
  return report == nullptr ? 0 : report->value.suites.size();
}

ssf_status ssf_report_suite(const ssf_report* report, size_t i, const char** name,
                            const char** status, double* max_residual) {
  return guarded([&] {
    require(report, "report");
    if (i >= report->value.suites.size()) {
      throw ssf::Error(ssf::ErrorKind::InvalidInput, "suite index out of range");
    }
    const auto& s = report->value.suites[i];
    if (name) *name = s.name.c_str();
    if (status) *status = report->statuses[i].c_str();
    if (max_residual) *max_residual = s.max_residual;
  });
}

ssf_status ssf_report_write(const ssf_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    emit(report->value.to_json(), path);
  });
}

void ssf_report_free(ssf_report* report) { delete report; }

}  // extern "C"
