#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssf/io.hpp"

namespace ssf {

enum class SuiteStatus { Pass, Fail, Skipped };

struct SuiteResult {
  std::string name;
  SuiteStatus status = SuiteStatus::Pass;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::string kind;
  std::uint64_t descriptor_hash = 0;
  std::vector<SuiteResult> suites;

  bool passed() const;
  const SuiteResult* find(const std::string& name) const;
  std::string to_json() const;
};

/// Runs every suite that applies to the descriptor kind. Numerical errors
/// raised inside a suite mark that suite as failed.
VerifyReport run_verify(const Descriptor& desc, const RunConfig& cfg);

/// Haar-like unitary from the QR factor of a seeded complex Gaussian matrix.
CMatrix random_unitary(Eigen::Index n, std::uint64_t seed);

/// Seeded points with real part in [re_lo, re_hi] and imaginary part in
/// [0.01, 2].
std::vector<cplx> sample_upper_half_plane(std::size_t count, double re_lo, double re_hi,
                                          std::uint64_t seed);

}  // namespace ssf
