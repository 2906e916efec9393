#ifndef PXLAP_PXLAP_H
#define PXLAP_PXLAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PXL_API __declspec(dllexport)
#elif defined(__GNUC__)
#define PXL_API __attribute__((visibility("default")))
#else
#define PXL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status; PXL_OK is 0. On failure pxl_last_error()
 * holds a message for the calling thread until its next failing call. */
typedef enum pxl_status {
  PXL_OK = 0,
  PXL_INVALID_ARGUMENT = 1,
  PXL_OUTSIDE_CONE = 2,
  PXL_MESH_MISMATCH = 3,
  PXL_INADMISSIBLE = 4,
  PXL_SYNTAX = 5,
  PXL_CONFIG = 6,
  PXL_NONCONVERGENCE = 7,
  PXL_MODEL_DEFECT = 8,
  PXL_INTERNAL = 9
} pxl_status;

/* Verdict of a command that ran to completion. */
typedef enum pxl_outcome {
  PXL_PASS = 0,
  PXL_CHECK_FAILED = 1,
  PXL_NONCONVERGED = 3
} pxl_outcome;

typedef enum pxl_suite {
  PXL_SUITE_CONVEXITY = 0,
  PXL_SUITE_DIAZ_SAA = 1,
  PXL_SUITE_COMPARISON = 2
} pxl_suite;

typedef struct pxl_expr pxl_expr;
typedef struct pxl_config pxl_config;
typedef struct pxl_result pxl_result;

typedef struct pxl_suite_params {
  int n;
  int dimension;
  size_t samples;
  uint64_t seed;
} pxl_suite_params;

typedef struct pxl_eig_params {
  double r;
  int levels;
  int n;
  double a;
  double b;
} pxl_eig_params;

PXL_API const char* pxl_version(void);
PXL_API const char* pxl_status_name(pxl_status status);
PXL_API const char* pxl_last_error(void);

/* Expressions over x and y. On a syntax error *error_offset (if given)
 * receives the byte offset. */
PXL_API pxl_status pxl_expr_parse(const char* source, pxl_expr** out, size_t* error_offset);
PXL_API pxl_status pxl_expr_eval(const pxl_expr* expr, double x, double y, double* out);
/* Copies the canonical form into buf (NUL-terminated, truncated to cap);
 * *needed receives the full length plus one. */
PXL_API pxl_status pxl_expr_print(const pxl_expr* expr, char* buf, size_t cap, size_t* needed);
PXL_API void pxl_expr_free(pxl_expr* expr);

/* Run configuration (JSON). */
PXL_API pxl_status pxl_config_parse(const char* json_text, pxl_config** out);
PXL_API pxl_status pxl_config_load(const char* path, pxl_config** out);
PXL_API pxl_status pxl_config_set_seed(pxl_config* config, uint64_t seed);
PXL_API pxl_status pxl_config_has_seed(const pxl_config* config, int* out);
/* nx applies to both domain kinds; ny (rectangles only) is ignored when 0. */
PXL_API pxl_status pxl_config_set_resolution(pxl_config* config, int nx, int ny);
/* Fills params from the check block; seed comes from the config seed if set. */
PXL_API pxl_status pxl_config_suite_params(const pxl_config* config, pxl_suite suite, pxl_suite_params* out);
/* Output file names from the output block; valid while config lives. */
PXL_API const char* pxl_config_solution_name(const pxl_config* config);
PXL_API const char* pxl_config_report_name(const pxl_config* config);
/* Normalized JSON; the string lives as long as the config. */
PXL_API const char* pxl_config_json(const pxl_config* config);
PXL_API void pxl_config_free(pxl_config* config);

PXL_API void pxl_suite_params_default(pxl_suite suite, pxl_suite_params* out);
PXL_API void pxl_eig_params_default(pxl_eig_params* out);

/* Commands. A returned result is owned by the caller. */
PXL_API pxl_status pxl_run_solve(const pxl_config* config, pxl_result** out);
PXL_API pxl_status pxl_run_validate(const pxl_config* config, pxl_result** out);
PXL_API pxl_status pxl_run_check(pxl_suite suite, const pxl_suite_params* params, pxl_result** out);
PXL_API pxl_status pxl_run_eig(const pxl_eig_params* params, pxl_result** out);
/* parameter NULL with count 0 takes the sweep block of the config. */
PXL_API pxl_status pxl_run_sweep(const pxl_config* config, const char* parameter, const double* values, size_t count,
                                 pxl_result** out);

PXL_API pxl_outcome pxl_result_outcome(const pxl_result* result);
/* JSON report, CSV table (possibly empty) and one-line summary; valid while
 * the result lives. */
PXL_API const char* pxl_result_report(const pxl_result* result);
PXL_API const char* pxl_result_table(const pxl_result* result);
PXL_API const char* pxl_result_summary(const pxl_result* result);
/* Numeric report field by dotted path, e.g. "result.energy" or "levels.2.lambda". */
PXL_API pxl_status pxl_result_number(const pxl_result* result, const char* path, double* out);
PXL_API void pxl_result_free(pxl_result* result);

/* First Dirichlet eigenvalue of the r-Laplacian on (a, b) with n cells. */
PXL_API pxl_status pxl_first_eigenvalue(double a, double b, int n, double r, double* lambda);

/* Writes data to path through a temporary file and a rename. */
PXL_API pxl_status pxl_write_file(const char* path, const char* data);

#ifdef __cplusplus
}
#endif

#endif
