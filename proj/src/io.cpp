#include "ssf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "ssf/errors.hpp"

namespace ssf {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

double number(const json& j, const std::string& field) {
  if (!j.is_number()) bad("field '" + field + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad("field '" + field + "' is not finite");
  return v;
}

double required(const json& doc, const std::string& field) {
  if (!doc.contains(field)) bad("missing field '" + field + "'");
  return number(doc.at(field), field);
}

std::optional<double> optional_number(const json& doc, const std::string& field) {
  if (!doc.contains(field) || doc.at(field).is_null()) return std::nullopt;
  return number(doc.at(field), field);
}

std::vector<double> number_list(const json& doc, const std::string& field) {
  if (!doc.contains(field)) return {};
  const json& arr = doc.at(field);
  if (arr.is_number()) return {number(arr, field)};
  if (!arr.is_array()) bad("field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& v : arr) out.push_back(number(v, field));
  return out;
}

std::array<double, 2> pair_field(const json& doc, const std::string& field) {
  const auto v = number_list(doc, field);
  if (v.size() != 2) bad("field '" + field + "' must hold two numbers");
  return {v[0], v[1]};
}

cplx entry(const json& j, const std::string& field) {
  if (j.is_number()) return number(j, field);
  if (j.is_array() && j.size() == 2) return {number(j[0], field), number(j[1], field)};
  bad("entries of '" + field + "' must be numbers or [re, im] pairs");
}

CMatrix matrix_field(const json& doc, const std::string& field) {
  if (!doc.contains(field)) bad("missing field '" + field + "'");
  const json& rows = doc.at(field);
  if (!rows.is_array() || rows.empty()) bad("field '" + field + "' must be a non-empty list of rows");
  const auto r = static_cast<Eigen::Index>(rows.size());
  if (!rows[0].is_array() || rows[0].empty()) bad("rows of '" + field + "' must be non-empty lists");
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  CMatrix out(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      bad("field '" + field + "' is not rectangular");
    }
    for (Eigen::Index k = 0; k < c; ++k) out(i, k) = entry(row[static_cast<std::size_t>(k)], field);
  }
  return out;
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) { return std::strtod(fmt12(v).c_str(), nullptr); }

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Descriptor parse_descriptor(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("descriptor is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("descriptor must be a JSON object");
  if (!doc.contains("kind") || !doc.at("kind").is_string()) bad("missing string field 'kind'");

  Descriptor out;
  out.kind = doc.at("kind").get<std::string>();
  out.hash = fnv1a(text);

  if (out.kind == "matrix") {
    MatrixDescriptor m;
    m.a = matrix_field(doc, "A");
    m.g = matrix_field(doc, "G");
    m.t = matrix_field(doc, "T");
    if (doc.contains("n") && required(doc, "n") != static_cast<double>(m.a.rows())) {
      bad("field 'n' does not match the size of A");
    }
    if (doc.contains("d") && required(doc, "d") != static_cast<double>(m.g.cols())) {
      bad("field 'd' does not match the columns of G");
    }
    if (m.a.rows() != m.a.cols()) bad("A must be square");
    m.zeta0 = optional_number(doc, "zeta0");
    out.body = std::move(m);
  } else if (out.kind == "robin") {
    RobinDescriptor r;
    r.length = required(doc, "L");
    r.potential = number_list(doc, "potential");
    r.beta0 = pair_field(doc, "beta0");
    r.beta1 = pair_field(doc, "beta1");
    r.beta = required(doc, "beta");
    out.body = std::move(r);
  } else if (out.kind == "delta") {
    DeltaDescriptor d;
    d.alpha = required(doc, "alpha");
    d.c = optional_number(doc, "c");
    if (doc.contains("path")) {
      const std::string p = doc.at("path").is_string() ? doc.at("path").get<std::string>() : "";
      if (p == "direct") {
        d.path = DeltaPath::Direct;
      } else if (p == "comparison") {
        d.path = DeltaPath::Comparison;
      } else {
        bad("field 'path' must be \"direct\" or \"comparison\"");
      }
    }
    out.body = d;
  } else if (out.kind == "decouple") {
    DecoupleDescriptor d;
    d.cutoff = required(doc, "R");
    d.potential = number_list(doc, "V");
    out.body = std::move(d);
  } else {
    bad("unknown kind '" + out.kind + "' (expected matrix, robin, delta or decouple)");
  }
  return out;
}

Descriptor load_descriptor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open descriptor '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_descriptor(ss.str());
}

void RunConfig::validate() const {
  if (!std::isfinite(grid_min) || !std::isfinite(grid_max) || !(grid_min < grid_max)) {
    bad("grid_min must be below grid_max");
  }
  if (grid_points < 2) bad("grid_points must be at least 2");
  if (power < 1 || power % 2 == 0) bad("power must be an odd positive integer");
  if (!(eps_start > 0.0) || !(eps_ratio > 0.0 && eps_ratio < 1.0) || eps_count < 1) {
    bad("epsilon schedule needs eps_start > 0, 0 < eps_ratio < 1, eps_count >= 1");
  }
  schedule().validate();
}

EpsilonSchedule RunConfig::schedule() const {
  return EpsilonSchedule::geometric(eps_start, eps_ratio, eps_count, eps_count > 1 ? eps_order : 0);
}

std::vector<double> RunConfig::grid() const { return uniform_grid(grid_min, grid_max, grid_points); }

LogOptions RunConfig::log_options() const {
  LogOptions opts;
  if (fault == Fault::WrongBranch) opts.branch = LogBranch::PositiveImaginary;
  return opts;
}

PerturbationPair make_pair(const MatrixDescriptor& d) {
  return PerturbationPair(HermitianOperator(d.a), d.g, d.t, d.zeta0);
}

RobinIntervalModel make_model(const RobinDescriptor& d) {
  return RobinIntervalModel(d.length, d.potential, d.beta0, d.beta1, d.beta);
}

DeltaPointModel make_model(const DeltaDescriptor& d) { return DeltaPointModel(d.alpha, d.c); }

DecoupledLineModel make_model(const DecoupleDescriptor& d) {
  return DecoupledLineModel(d.cutoff, d.potential);
}

NevanlinnaEvaluator faulted(NevanlinnaEvaluator m, Fault fault) {
  if (fault != Fault::FlipImSign) return m;
  return NevanlinnaEvaluator(m.boundary_dim(),
                             [m](cplx z) -> CMatrix { return m(z).adjoint(); },
                             m.real_interval());
}

SsfGrid compute_ssf(const Descriptor& desc, const RunConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.grid();
  const auto sched = cfg.schedule();
  SsfOptions opts;
  opts.log = cfg.log_options();
  opts.power = cfg.power;
  opts.basis_seed = cfg.basis_seed;

  if (const auto* m = std::get_if<MatrixDescriptor>(&desc.body)) {
    const PerturbationPair pair = make_pair(*m);
    SsfGrid out = pair.coupling_positive()
                      ? ssf_boundary_limit(faulted(pair.weyl_function(), cfg.fault), grid, sched, opts)
                      : pair_ssf(pair, grid, sched, opts);
    for (double lambda : out.lambda) {
      out.xi_oracle.push_back(static_cast<double>(ssf_counting_oracle(pair.a_op(), pair.b_op(), lambda)));
    }
    return out;
  }
  if (const auto* r = std::get_if<RobinDescriptor>(&desc.body)) {
    return robin_ssf(make_model(*r), grid, sched, opts);
  }
  if (const auto* d = std::get_if<DeltaDescriptor>(&desc.body)) {
    return delta_ssf(make_model(*d), grid, sched, d->path, opts);
  }
  const auto& dc = std::get<DecoupleDescriptor>(desc.body);
  return decoupled_ssf(make_model(dc), grid, sched, opts);
}

std::string format_csv(const SsfGrid& grid) {
  std::string out = grid.has_oracle() ? "lambda,xi,xi_oracle,abs_err\n" : "lambda,xi\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out += fmt12(grid.lambda[i]) + "," + fmt12(grid.xi[i]);
    if (grid.has_oracle()) {
      out += "," + fmt12(grid.xi_oracle[i]) + "," + fmt12(std::abs(grid.xi[i] - grid.xi_oracle[i]));
    }
    out += "\n";
  }
  return out;
}

std::string format_json(const SsfGrid& grid, const Descriptor& desc, const RunConfig& cfg) {
  json meta;
  meta["kind"] = desc.kind;
  meta["descriptor_hash"] = hex64(desc.hash);
  meta["basis_seed"] = cfg.basis_seed;
  meta["power"] = grid.power;
  meta["unstable_points"] = grid.unstable_points;
  meta["grid"] = {{"min", cfg.grid_min}, {"max", cfg.grid_max}, {"points", cfg.grid_points}};
  meta["eps_schedule"] = {{"values", grid.eps_schedule.values},
                          {"extrapolation_order", grid.eps_schedule.extrapolation_order}};
  meta["tolerances"] = {{"hermitian", kHermitianTol},
                        {"spectrum", kSpectrumTol},
                        {"branch_cut", 1e-10},
                        {"ode_relative", 1e-10},
                        {"jump_threshold", 0.5},
                        {"refine_width", 1e-4}};

  json cols;
  auto column = [&](const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(round12(x));
    return arr;
  };
  cols["lambda"] = column(grid.lambda);
  cols["xi"] = column(grid.xi);
  if (grid.has_oracle()) {
    std::vector<double> err(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) err[i] = std::abs(grid.xi[i] - grid.xi_oracle[i]);
    cols["xi_oracle"] = column(grid.xi_oracle);
    cols["abs_err"] = column(err);
  }
  json doc;
  doc["metadata"] = meta;
  doc["columns"] = cols;
  return doc.dump(2) + "\n";
}

std::string format_svg(const SsfGrid& grid, const std::string& title) {
  constexpr double W = 720, H = 440, ml = 64, mr = 20, mt = 36, mb = 48;
  const double x0 = grid.lambda.empty() ? 0.0 : grid.lambda.front();
  const double x1 = grid.lambda.empty() ? 1.0 : grid.lambda.back();
  double y0 = 0.0, y1 = 1.0;
  if (!grid.xi.empty()) {
    y0 = std::min(0.0, *std::min_element(grid.xi.begin(), grid.xi.end()));
    y1 = std::max(0.0, *std::max_element(grid.xi.begin(), grid.xi.end()));
  }
  if (y1 - y0 < 1e-9) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"14\">"
     << title << "</text>\n";
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
     << "\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0;
    const double yv = y0 + (y1 - y0) * k / 5.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">"
       << fmt12(round12(xv)).substr(0, 8) << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
       << fmt12(round12(yv)).substr(0, 8) << "</text>\n";
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\">lambda</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\">xi</text>\n";
  os << "</g>\n";
  if (y0 < 0.0 && y1 > 0.0) {
    os << "<line x1=\"" << ml << "\" y1=\"" << py(0.0) << "\" x2=\"" << W - mr << "\" y2=\""
       << py(0.0) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  }
  os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && std::abs(grid.xi[i] - grid.xi[i - 1]) > 0.5) {
      // Jumps are drawn as steps at the midpoint of the bracketing interval.
      const double xm = 0.5 * (grid.lambda[i] + grid.lambda[i - 1]);
      os << px(xm) << "," << py(grid.xi[i - 1]) << " " << px(xm) << "," << py(grid.xi[i]) << " ";
    }
    os << px(grid.lambda[i]) << "," << py(grid.xi[i]) << " ";
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

SsfGrid parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) bad("CSV is empty");
  const bool with_oracle = line == "lambda,xi,xi_oracle,abs_err";
  if (!with_oracle && line != "lambda,xi") bad("unexpected CSV header '" + line + "'");
  SsfGrid out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(std::strtod(cell.c_str(), nullptr));
    if (cells.size() != (with_oracle ? 4u : 2u)) bad("malformed CSV row '" + line + "'");
    out.lambda.push_back(cells[0]);
    out.xi.push_back(cells[1]);
    if (with_oracle) out.xi_oracle.push_back(cells[2]);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write '" + path + "'");
  out << text;
  if (!out) bad("failed writing '" + path + "'");
}

}  // namespace ssf
