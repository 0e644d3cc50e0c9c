#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssf/models.hpp"
#include "ssf/spectral_shift.hpp"
#include "ssf/triple.hpp"

namespace ssf {

struct MatrixDescriptor {
  CMatrix a, g, t;
  std::optional<double> zeta0;
};

struct RobinDescriptor {
  double length = 1.0;
  std::vector<double> potential;
  std::array<double, 2> beta0{}, beta1{};
  double beta = 0.0;
};

struct DeltaDescriptor {
  double alpha = 0.0;
  std::optional<double> c;
  DeltaPath path = DeltaPath::Direct;
};

struct DecoupleDescriptor {
  double cutoff = 1.0;
  std::vector<double> potential;
};

/// A parsed input document. `kind` is one of matrix, robin, delta, decouple.
struct Descriptor {
  std::string kind;
  std::variant<MatrixDescriptor, RobinDescriptor, DeltaDescriptor, DecoupleDescriptor> body;
  std::uint64_t hash = 0;  // FNV-1a of the source text
};

/// Parses JSON text; InvalidInput names the offending field.
Descriptor parse_descriptor(const std::string& text);
Descriptor load_descriptor(const std::string& path);

std::uint64_t fnv1a(const std::string& bytes);

enum class Fault { None, FlipImSign, WrongBranch };

struct RunConfig {
  double grid_min = -1.0;
  double grid_max = 2.0;
  std::size_t grid_points = 301;
  double eps_start = 1e-3;
  double eps_ratio = 0.1;
  int eps_count = 3;
  int eps_order = 1;
  int power = 1;
  std::uint64_t basis_seed = 0;
  Fault fault = Fault::None;

  void validate() const;
  EpsilonSchedule schedule() const;
  std::vector<double> grid() const;
  LogOptions log_options() const;
};

PerturbationPair make_pair(const MatrixDescriptor& d);
RobinIntervalModel make_model(const RobinDescriptor& d);
DeltaPointModel make_model(const DeltaDescriptor& d);
DecoupledLineModel make_model(const DecoupleDescriptor& d);

/// M of the pair, with the configured fault applied.
NevanlinnaEvaluator faulted(NevanlinnaEvaluator m, Fault fault);

/// The SSF grid for any descriptor kind, oracle attached where one exists.
SsfGrid compute_ssf(const Descriptor& desc, const RunConfig& cfg);

std::string format_csv(const SsfGrid& grid);
std::string format_json(const SsfGrid& grid, const Descriptor& desc, const RunConfig& cfg);
std::string format_svg(const SsfGrid& grid, const std::string& title);

/// Reads back the output of format_csv.
SsfGrid parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace ssf
