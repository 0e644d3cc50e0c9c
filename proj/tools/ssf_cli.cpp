// ssf: batch front-end over the C API.
//
//   ssf matrix|robin|delta|decouple [flags] INPUT   compute the SSF grid
//   ssf verify [flags] INPUT                        run the verification suites
//
// Exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical error.

#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "ssf.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string input;
  std::string out;
  std::string format = "csv";
  std::string fault = "none";
  bool plot = false;
  ssf_run_config cfg{};
};

int report_status(ssf_status s) {
  std::fprintf(stderr, "ssf: %s\n", ssf_last_error());
  return ssf_status_is_input_error(s) ? kExitInput : kExitNumerical;
}

std::string svg_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".svg");
  if (p == std::filesystem::path(out)) p += ".plot.svg";
  return p.string();
}

int run_compute(const std::string& kind, const Options& o) {
  ssf_descriptor* desc = nullptr;
  ssf_status s = ssf_descriptor_load(o.input.c_str(), &desc);
  if (s != SSF_OK) return report_status(s);
  if (kind != ssf_descriptor_kind(desc)) {
    std::fprintf(stderr, "ssf: InvalidInput: descriptor kind '%s' does not match subcommand '%s'\n",
                 ssf_descriptor_kind(desc), kind.c_str());
    ssf_descriptor_free(desc);
    return kExitInput;
  }

  ssf_grid* grid = nullptr;
  s = ssf_compute(desc, &o.cfg, &grid);
  if (s == SSF_OK) {
    const ssf_format fmt = o.format == "json" ? SSF_FORMAT_JSON : SSF_FORMAT_CSV;
    s = ssf_grid_write(grid, desc, &o.cfg, fmt, o.out.empty() ? nullptr : o.out.c_str());
  }
  if (s == SSF_OK && o.plot) {
    const std::string title = "spectral shift function (" + kind + ")";
    s = ssf_grid_write_svg(grid, title.c_str(), svg_path(o.out).c_str());
  }
  ssf_grid_free(grid);
  ssf_descriptor_free(desc);
  return s == SSF_OK ? kExitOk : report_status(s);
}

int run_verify(const Options& o) {
  ssf_descriptor* desc = nullptr;
  ssf_status s = ssf_descriptor_load(o.input.c_str(), &desc);
  if (s != SSF_OK) return report_status(s);

  ssf_report* report = nullptr;
  s = ssf_verify(desc, &o.cfg, &report);
  ssf_descriptor_free(desc);
  if (s != SSF_OK) return report_status(s);

  s = ssf_report_write(report, o.out.empty() ? nullptr : o.out.c_str());
  const std::size_t count = ssf_report_suite_count(report);
  for (std::size_t i = 0; i < count; ++i) {
    const char* name = nullptr;
    const char* status = nullptr;
    double residual = 0.0;
    if (ssf_report_suite(report, i, &name, &status, &residual) == SSF_OK) {
      std::fprintf(stderr, "%-24s %-8s %.3e\n", name, status, residual);
    }
  }
  const bool passed = ssf_report_passed(report) != 0;
  ssf_report_free(report);
  if (s != SSF_OK) return report_status(s);
  return passed ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  ssf_run_config_init(&o.cfg);

  CLI::App app{"Spectral shift functions from boundary data"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "Descriptor file (JSON)")->required();
    sub->add_option("--grid-min", o.cfg.grid_min, "Lower end of the lambda grid");
    sub->add_option("--grid-max", o.cfg.grid_max, "Upper end of the lambda grid");
    sub->add_option("--grid-points", o.cfg.grid_points, "Number of grid points");
    sub->add_option("--eps-start", o.cfg.eps_start, "Largest epsilon of the boundary schedule");
    sub->add_option("--eps-ratio", o.cfg.eps_ratio, "Geometric ratio of the epsilon schedule");
    sub->add_option("--eps-count", o.cfg.eps_count, "Number of epsilon levels");
    sub->add_option("--power", o.cfg.power, "Odd trace-formula power m");
    sub->add_option("--basis-seed", o.cfg.basis_seed, "Seed for random bases");
    sub->add_option("--out", o.out, "Output path (stdout when omitted)");
    sub->add_option("--fault", o.fault, "Inject a fault into the evaluator")
        ->check(CLI::IsMember({"none", "flip-im-sign", "wrong-branch"}));
  };

  std::map<std::string, CLI::App*> compute;
  for (const char* kind : {"matrix", "robin", "delta", "decouple"}) {
    auto* sub = app.add_subcommand(kind, std::string("Compute the SSF of a ") + kind + " descriptor");
    add_common(sub);
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--plot", o.plot, "Also write an SVG plot next to --out");
    compute[kind] = sub;
  }
  auto* verify = app.add_subcommand("verify", "Run the verification suites");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  if (o.plot && o.out.empty()) {
    std::fprintf(stderr, "ssf: InvalidInput: --plot requires --out\n");
    return kExitInput;
  }
  o.cfg.fault = o.fault == "flip-im-sign"   ? SSF_FAULT_FLIP_IM_SIGN
                : o.fault == "wrong-branch" ? SSF_FAULT_WRONG_BRANCH
                                            : SSF_FAULT_NONE;

  if (verify->parsed()) return run_verify(o);
  for (const auto& [kind, sub] : compute) {
    if (sub->parsed()) return run_compute(kind, o);
  }
  return kExitInput;
}
