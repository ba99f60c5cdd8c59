#include "spectral_lab/spectral_lab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "spectral_lab/cli_reports.hpp"

using namespace spectral_lab;

struct sl_domain {
  ConvexDomain domain;
};

struct sl_config {
  CampaignConfig config;
};

struct sl_report {
  CampaignReport report;
  CampaignConfig config;
};

namespace {

thread_local std::string g_last_error;

sl_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return SL_ERR_INVALID_ARGUMENT;
    case ErrorKind::Domain: return SL_ERR_DOMAIN;
    case ErrorKind::Singularity: return SL_ERR_SINGULARITY;
    case ErrorKind::Numerical: return SL_ERR_NUMERICAL;
    case ErrorKind::Validity: return SL_ERR_VALIDITY;
    case ErrorKind::Precondition: return SL_ERR_PRECONDITION;
    case ErrorKind::Truncation: return SL_ERR_TRUNCATION;
    case ErrorKind::Generation: return SL_ERR_GENERATION;
    case ErrorKind::Config: return SL_ERR_CONFIG;
    case ErrorKind::Io: return SL_ERR_IO;
  }
  return SL_ERR_INTERNAL;
}

template <class F>
sl_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SL_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sl_status make_domain(sl_domain** out, auto&& factory) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    *out = new sl_domain{factory()};
  });
}

}  // namespace

extern "C" {

const char* sl_last_error(void) { return g_last_error.c_str(); }

const char* sl_status_name(sl_status status) {
  switch (status) {
    case SL_OK: return "ok";
    case SL_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case SL_ERR_DOMAIN: return "domain";
    case SL_ERR_SINGULARITY: return "singularity";
    case SL_ERR_NUMERICAL: return "numerical";
    case SL_ERR_VALIDITY: return "validity";
    case SL_ERR_PRECONDITION: return "precondition";
    case SL_ERR_TRUNCATION: return "truncation";
    case SL_ERR_GENERATION: return "generation";
    case SL_ERR_CONFIG: return "config";
    case SL_ERR_IO: return "io";
    case SL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void sl_string_free(char* s) { std::free(s); }

sl_status sl_kappa(double alpha, double* k_out) {
  return guarded([&] {
    require(k_out, "k_out");
    *k_out = k_of_alpha(alpha);
  });
}

sl_status sl_quartic_residual(double c, double alpha, double* residual_out) {
  return guarded([&] {
    require(residual_out, "residual_out");
    if (!(c >= 0)) throw Error(ErrorKind::InvalidArgument, "quartic residual requires C >= 0");
    *residual_out = quartic_residual(c, alpha);
  });
}

sl_status sl_domain_parse(const char* spec, sl_domain** out) {
  return make_domain(out, [&] {
    require(spec, "spec");
    return parse_domain_spec(spec).build();
  });
}

sl_status sl_domain_halfplane(sl_domain** out) {
  return make_domain(out, [] { return ConvexDomain::half_plane(); });
}

sl_status sl_domain_hyperbola(double a, double b, sl_domain** out) {
  return make_domain(out, [&] { return ConvexDomain::hyperbola(a, b); });
}

sl_status sl_domain_parabola(double p, sl_domain** out) {
  return make_domain(out, [&] { return ConvexDomain::parabola(p); });
}

sl_status sl_domain_sector_approx(double alpha, sl_domain** out) {
  return make_domain(out, [&] { return ConvexDomain::sector_approx(alpha); });
}

void sl_domain_destroy(sl_domain* d) { delete d; }

sl_status sl_domain_alpha(const sl_domain* d, double* alpha_out) {
  return guarded([&] {
    require(d, "domain");
    require(alpha_out, "alpha_out");
    *alpha_out = aperture(d->domain);
  });
}

sl_status sl_domain_contains(const sl_domain* d, double re, double im, int* inside_out) {
  return guarded([&] {
    require(d, "domain");
    require(inside_out, "inside_out");
    *inside_out = d->domain.inside(Complex(re, im)) ? 1 : 0;
  });
}

sl_status sl_domain_boundary_point(const sl_domain* d, double t, double* re_out, double* im_out) {
  return guarded([&] {
    require(d, "domain");
    require(re_out, "re_out");
    require(im_out, "im_out");
    const Complex s = d->domain.boundary_point(t).sigma;
    *re_out = s.real();
    *im_out = s.imag();
  });
}

sl_status sl_domain_describe(const sl_domain* d, char** out) {
  return guarded([&] {
    require(d, "domain");
    require(out, "out");
    *out = copy_string(d->domain.describe());
  });
}

sl_status sl_mass(const sl_domain* d, double re, double im, int on_boundary, double tol,
                  sl_mass_result* out) {
  return guarded([&] {
    require(d, "domain");
    require(out, "out");
    const Complex z(re, im);
    const Complex focus[] = {z};
    const BoundaryQuadrature q = build_quadrature(d->domain, focus, tol);
    out->mass = mass(q, z, on_boundary != 0);
    out->expected = expected_mass(d->domain, on_boundary != 0);
    out->tail_bound = q.tail_bound;
    out->truncation_m = q.truncation_m;
    out->nodes = q.size();
  });
}

sl_status sl_config_default(sl_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new sl_config{default_config()};
  });
}

sl_status sl_config_parse(const char* json_text, sl_config** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = nullptr;
    *out = new sl_config{parse_config(json_text)};
  });
}

sl_status sl_config_load(const char* path, sl_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new sl_config{load_config(path)};
  });
}

void sl_config_destroy(sl_config* c) { delete c; }

sl_status sl_config_serialize(const sl_config* c, char** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "out");
    *out = copy_string(serialize_config(c->config));
  });
}

sl_status sl_config_set_outputs(sl_config* c, const char* csv_path, const char* json_path,
                                const char* svg_path) {
  return guarded([&] {
    require(c, "config");
    if (csv_path) c->config.outputs.csv_path = csv_path;
    if (json_path) c->config.outputs.json_path = json_path;
    if (svg_path) c->config.outputs.svg_path = svg_path;
  });
}

sl_status sl_config_check_outputs(const sl_config* c) {
  return guarded([&] {
    require(c, "config");
    check_outputs_writable(c->config.outputs);
  });
}

sl_status sl_campaign_run(const sl_config* c, size_t threads, sl_report** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "out");
    *out = nullptr;
    *out = new sl_report{run_campaign(c->config.design(), threads), c->config};
  });
}

void sl_report_destroy(sl_report* r) { delete r; }

sl_status sl_report_summary_get(const sl_report* r, sl_report_summary* out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    const Aggregate& a = r->report.overall;
    out->trials = a.trials;
    out->violations = a.violations;
    out->failures = a.failures;
    out->max_ratio = a.max_ratio;
    out->max_ratio_over_k = a.max_ratio_over_k;
    out->min_margin_lemma1 = a.min_margin_lemma1;
    out->min_margin_lemma2 = a.min_margin_lemma2;
    out->max_schwenninger_residual = a.max_schwenninger_residual;
    out->max_adjoint_residual = a.max_adjoint_residual;
    out->max_quad_error = a.max_quad_error;
    out->declared_tolerance = r->report.declared_tolerance;
  });
}

sl_status sl_report_csv(const sl_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = copy_string(report_csv(r->report));
  });
}

sl_status sl_report_json(const sl_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = copy_string(report_json(r->report, r->config).dump(2) + "\n");
  });
}

sl_status sl_report_write(const sl_report* r) {
  return guarded([&] {
    require(r, "report");
    emit_report(r->report, r->config);
  });
}

int sl_report_exit_code(const sl_report* r) { return r ? exit_code(r->report) : 2; }

sl_status sl_sweep_alpha(const sl_config* c, int points, int count, size_t threads,
                         sl_sweep_row* rows) {
  return guarded([&] {
    require(c, "config");
    require(rows, "rows");
    const std::vector<SweepRow> out = sweep_alpha(c->config, points, count, threads);
    for (std::size_t i = 0; i < out.size(); ++i)
      rows[i] = {out[i].alpha,  out[i].k_alpha,    out[i].max_ratio, out[i].max_ratio_over_k,
                 out[i].trials, out[i].violations, out[i].failures};
  });
}

}  // extern "C"
