#ifndef SPECTRAL_LAB_H
#define SPECTRAL_LAB_H

#include <stddef.h>

#if defined(_WIN32)
#  define SL_API __declspec(dllexport)
#else
#  define SL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sl_status {
  SL_OK = 0,
  SL_ERR_INVALID_ARGUMENT = 1,
  SL_ERR_DOMAIN = 2,
  SL_ERR_SINGULARITY = 3,
  SL_ERR_NUMERICAL = 4,
  SL_ERR_VALIDITY = 5,
  SL_ERR_PRECONDITION = 6,
  SL_ERR_TRUNCATION = 7,
  SL_ERR_GENERATION = 8,
  SL_ERR_CONFIG = 9,
  SL_ERR_IO = 10,
  SL_ERR_INTERNAL = 11
} sl_status;

typedef struct sl_domain sl_domain;
typedef struct sl_config sl_config;
typedef struct sl_report sl_report;

/* Message of the last failing call on this thread; never NULL. */
SL_API const char* sl_last_error(void);
SL_API const char* sl_status_name(sl_status status);
/* Strings returned through char** out-parameters are released with this. */
SL_API void sl_string_free(char* s);

SL_API sl_status sl_kappa(double alpha, double* k_out);
SL_API sl_status sl_quartic_residual(double c, double alpha, double* residual_out);

/* "halfplane", "hyperbola:a,b", "parabola:p" or "sector-approx:alpha[,a]". */
SL_API sl_status sl_domain_parse(const char* spec, sl_domain** out);
SL_API sl_status sl_domain_halfplane(sl_domain** out);
SL_API sl_status sl_domain_hyperbola(double a, double b, sl_domain** out);
SL_API sl_status sl_domain_parabola(double p, sl_domain** out);
SL_API sl_status sl_domain_sector_approx(double alpha, sl_domain** out);
SL_API void sl_domain_destroy(sl_domain* d);
SL_API sl_status sl_domain_alpha(const sl_domain* d, double* alpha_out);
SL_API sl_status sl_domain_contains(const sl_domain* d, double re, double im, int* inside_out);
SL_API sl_status sl_domain_boundary_point(const sl_domain* d, double t, double* re_out,
                                          double* im_out);
SL_API sl_status sl_domain_describe(const sl_domain* d, char** out);

typedef struct sl_mass_result {
  double mass;
  double expected;
  double tail_bound;
  double truncation_m;
  size_t nodes;
} sl_mass_result;

/* Quadrature mass of the kernel at z; on_boundary selects the boundary identity. */
SL_API sl_status sl_mass(const sl_domain* d, double re, double im, int on_boundary, double tol,
                         sl_mass_result* out);

SL_API sl_status sl_config_default(sl_config** out);
SL_API sl_status sl_config_parse(const char* json_text, sl_config** out);
SL_API sl_status sl_config_load(const char* path, sl_config** out);
SL_API void sl_config_destroy(sl_config* c);
SL_API sl_status sl_config_serialize(const sl_config* c, char** out);
/* NULL leaves a path unchanged; "" disables that output. */
SL_API sl_status sl_config_set_outputs(sl_config* c, const char* csv_path, const char* json_path,
                                       const char* svg_path);
SL_API sl_status sl_config_check_outputs(const sl_config* c);

/* threads = 0 uses the hardware concurrency; SPECTRAL_LAB_THREADS caps it. */
SL_API sl_status sl_campaign_run(const sl_config* c, size_t threads, sl_report** out);
SL_API void sl_report_destroy(sl_report* r);

typedef struct sl_report_summary {
  size_t trials;
  size_t violations;
  size_t failures;
  double max_ratio;
  double max_ratio_over_k;
  double min_margin_lemma1;
  double min_margin_lemma2;
  double max_schwenninger_residual;
  double max_adjoint_residual;
  double max_quad_error;
  double declared_tolerance;
} sl_report_summary;

SL_API sl_status sl_report_summary_get(const sl_report* r, sl_report_summary* out);
SL_API sl_status sl_report_csv(const sl_report* r, char** out);
SL_API sl_status sl_report_json(const sl_report* r, char** out);
/* Writes the outputs named in the config the report was run with. */
SL_API sl_status sl_report_write(const sl_report* r);
/* 0 all margins within slack, 1 a violation, 2 a hard failure. */
SL_API int sl_report_exit_code(const sl_report* r);

typedef struct sl_sweep_row {
  double alpha;
  double k_alpha;
  double max_ratio;
  double max_ratio_over_k;
  size_t trials;
  size_t violations;
  size_t failures;
} sl_sweep_row;

/* Fills rows[0 .. points-1]; count > 0 overrides every ensemble count. */
SL_API sl_status sl_sweep_alpha(const sl_config* c, int points, int count, size_t threads,
                                sl_sweep_row* rows);

#ifdef __cplusplus
}
#endif

#endif
