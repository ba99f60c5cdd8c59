#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spectral_lab/spectral_lab.h"

namespace {

constexpr int kExitHard = 2;

int report_failure(const char* what, sl_status status) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", what, sl_last_error(), sl_status_name(status));
  return kExitHard;
}

struct ConfigHandle {
  sl_config* ptr = nullptr;
  ~ConfigHandle() { sl_config_destroy(ptr); }
};

struct ReportHandle {
  sl_report* ptr = nullptr;
  ~ReportHandle() { sl_report_destroy(ptr); }
};

struct DomainHandle {
  sl_domain* ptr = nullptr;
  ~DomainHandle() { sl_domain_destroy(ptr); }
};

sl_status load_or_default(const std::string& path, ConfigHandle& cfg) {
  return path.empty() ? sl_config_default(&cfg.ptr) : sl_config_load(path.c_str(), &cfg.ptr);
}

struct VerifyArgs {
  std::string config;
  std::string csv, json, svg;
  std::size_t threads = 0;
  bool quiet = false;
};

int run_verify(const VerifyArgs& args) {
  ConfigHandle cfg;
  if (sl_status s = load_or_default(args.config, cfg)) return report_failure("config", s);
  const char* csv = args.csv.empty() ? nullptr : args.csv.c_str();
  const char* json = args.json.empty() ? nullptr : args.json.c_str();
  const char* svg = args.svg.empty() ? nullptr : args.svg.c_str();
  if (sl_status s = sl_config_set_outputs(cfg.ptr, csv, json, svg)) return report_failure("outputs", s);
  if (sl_status s = sl_config_check_outputs(cfg.ptr)) return report_failure("outputs", s);

  ReportHandle rep;
  if (sl_status s = sl_campaign_run(cfg.ptr, args.threads, &rep.ptr)) return report_failure("campaign", s);
  if (sl_status s = sl_report_write(rep.ptr)) return report_failure("report", s);

  sl_report_summary sum{};
  sl_report_summary_get(rep.ptr, &sum);
  const int code = sl_report_exit_code(rep.ptr);
  if (!args.quiet) {
    std::printf("trials                    %zu\n", sum.trials);
    std::printf("failures                  %zu\n", sum.failures);
    std::printf("violations                %zu\n", sum.violations);
    std::printf("declared tolerance        %.3e\n", sum.declared_tolerance);
    std::printf("max ratio (C lower bound) %.12f\n", sum.max_ratio);
    std::printf("max ratio / K(alpha)      %.12f\n", sum.max_ratio_over_k);
    std::printf("min boundary g margin     %.3e\n", sum.min_margin_lemma1);
    std::printf("min support margin        %.3e\n", sum.min_margin_lemma2);
    std::printf("max identity residual     %.3e\n", sum.max_schwenninger_residual);
    std::printf("max adjoint residual      %.3e\n", sum.max_adjoint_residual);
    std::printf("max quadrature error      %.3e\n", sum.max_quad_error);
    std::printf("exit code                 %d\n", code);
  }
  return code;
}

int run_kappa(double alpha) {
  double k = 0.0;
  if (sl_status s = sl_kappa(alpha, &k)) return report_failure("kappa", s);
  double residual = 0.0;
  if (sl_status s = sl_quartic_residual(k, alpha, &residual)) return report_failure("quartic", s);
  std::printf("alpha            %.17g\n", alpha);
  std::printf("K(alpha)         %.17g\n", k);
  std::printf("quartic residual %.3e\n", residual);
  return std::abs(residual) <= 1e-12 ? 0 : 1;
}

struct MassArgs {
  std::string domain;
  std::vector<double> z;
  double boundary_t = NAN;
  double tol = 1e-8;
  double slack = 10.0;
};

int run_mass(const MassArgs& args) {
  DomainHandle dom;
  if (sl_status s = sl_domain_parse(args.domain.c_str(), &dom.ptr)) return report_failure("domain", s);
  double re = 0.0, im = 0.0;
  const bool on_boundary = !std::isnan(args.boundary_t);
  if (on_boundary) {
    if (sl_status s = sl_domain_boundary_point(dom.ptr, args.boundary_t, &re, &im))
      return report_failure("boundary point", s);
  } else if (args.z.size() == 2) {
    re = args.z[0];
    im = args.z[1];
  } else {
    std::fprintf(stderr, "error: give --z re,im or --boundary-t t\n");
    return kExitHard;
  }
  sl_mass_result m{};
  if (sl_status s = sl_mass(dom.ptr, re, im, on_boundary ? 1 : 0, args.tol, &m))
    return report_failure("mass", s);
  const double err = m.mass - m.expected;
  std::printf("z            %.17g %+.17gi%s\n", re, im, on_boundary ? " (boundary)" : "");
  std::printf("mass         %.17g\n", m.mass);
  std::printf("expected     %.17g\n", m.expected);
  std::printf("error        %.3e\n", err);
  std::printf("tail bound   %.3e\n", m.tail_bound);
  std::printf("window m     %.6g\n", m.truncation_m);
  std::printf("nodes        %zu\n", m.nodes);
  return std::abs(err) <= args.slack * args.tol ? 0 : 1;
}

struct SweepArgs {
  int points = 5;
  int count = 5;
  std::string config;
  std::size_t threads = 0;
};

int run_sweep(const SweepArgs& args) {
  ConfigHandle cfg;
  if (sl_status s = load_or_default(args.config, cfg)) return report_failure("config", s);
  if (args.points < 2) {
    std::fprintf(stderr, "error: --points must be at least 2\n");
    return kExitHard;
  }
  std::vector<sl_sweep_row> rows(static_cast<std::size_t>(args.points));
  if (sl_status s = sl_sweep_alpha(cfg.ptr, args.points, args.count, args.threads, rows.data()))
    return report_failure("sweep", s);
  std::printf("%-20s %-20s %-20s %-14s %-7s %-10s %s\n", "alpha", "K(alpha)", "max_ratio",
              "ratio_over_k", "trials", "violations", "failures");
  int code = 0;
  for (const sl_sweep_row& r : rows) {
    std::printf("%-20.17g %-20.17g %-20.17g %-14.10f %-7zu %-10zu %zu\n", r.alpha, r.k_alpha,
                r.max_ratio, r.max_ratio_over_k, r.trials, r.violations, r.failures);
    if (r.failures > 0) code = kExitHard;
    else if (r.violations > 0 && code == 0) code = 1;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of spectral-set bounds on unbounded convex domains"};
  app.require_subcommand(1);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification campaign from a JSON config");
  verify_cmd->add_option("config", verify.config, "Config file (defaults built in when omitted)");
  verify_cmd->add_option("--csv", verify.csv, "CSV report path");
  verify_cmd->add_option("--json", verify.json, "JSON report path");
  verify_cmd->add_option("--svg", verify.svg, "SVG plot path");
  verify_cmd->add_option("--threads", verify.threads, "Worker threads (0 = all cores)");
  verify_cmd->add_flag("--quiet", verify.quiet, "Suppress the summary");

  double alpha = 0.0;
  auto* kappa_cmd = app.add_subcommand("kappa", "Print K(alpha) and the quartic root check");
  kappa_cmd->add_option("--alpha", alpha, "Half aperture in radians")->required();

  MassArgs mass;
  auto* mass_cmd = app.add_subcommand("mass", "Compare the quadrature kernel mass with its identity");
  mass_cmd->add_option("--domain", mass.domain, "halfplane | hyperbola:a,b | parabola:p | sector-approx:alpha")
      ->required();
  mass_cmd->add_option("--z", mass.z, "Interior point re,im")->delimiter(',')->expected(2);
  mass_cmd->add_option("--boundary-t", mass.boundary_t, "Use the boundary point at this parameter");
  mass_cmd->add_option("--tol", mass.tol, "Quadrature tolerance");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep-alpha", "Tabulate K(alpha) against the empirical max ratio");
  sweep_cmd->add_option("--points", sweep.points, "Number of alpha grid points")->required();
  sweep_cmd->add_option("--count", sweep.count, "Matrices per ensemble at each alpha");
  sweep_cmd->add_option("--config", sweep.config, "Config supplying ensembles and functions");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitHard;
  }

  if (*verify_cmd) return run_verify(verify);
  if (*kappa_cmd) return run_kappa(alpha);
  if (*mass_cmd) return run_mass(mass);
  return run_sweep(sweep);
}
