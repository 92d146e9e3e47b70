/* C interface to the sbm library. Handles are opaque; every call that can
   fail returns an sbm_status and leaves a message in sbm_last_error(). */
#ifndef SBM_H
#define SBM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define SBM_API __declspec(dllexport)
#else
#  define SBM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sbm_status {
  SBM_OK = 0,
  SBM_ERR_CONFIG = 1,
  SBM_ERR_VALIDATION = 2,
  SBM_ERR_NUMERIC = 3,
  SBM_ERR_ARGUMENT = 4,
  SBM_ERR_INTERNAL = 5
} sbm_status;

typedef struct sbm_config sbm_config;
typedef struct sbm_report sbm_report;
typedef struct sbm_spec sbm_spec;

/* Message for the last failing call on this thread; never NULL. */
SBM_API const char* sbm_last_error(void);
SBM_API const char* sbm_usage(void);
SBM_API const char* sbm_version(void);

SBM_API sbm_status sbm_config_parse(const char* text, sbm_config** out);
SBM_API sbm_status sbm_config_load(const char* path, sbm_config** out);
/* key is "section.key", e.g. "run.kappa" */
SBM_API sbm_status sbm_config_set(sbm_config* cfg, const char* key, const char* value);
/* "" when results go to standard output */
SBM_API const char* sbm_config_output_dir(const sbm_config* cfg);
SBM_API size_t sbm_config_format_count(const sbm_config* cfg);
SBM_API const char* sbm_config_format(const sbm_config* cfg, size_t i);
SBM_API void sbm_config_free(sbm_config* cfg);

SBM_API sbm_status sbm_run(const char* command, const sbm_config* cfg, sbm_report** out);
SBM_API int sbm_report_passed(const sbm_report* rep);
/* format: "json", "txt", or "csv:<table>"; free the result with sbm_string_free */
SBM_API sbm_status sbm_report_render(const sbm_report* rep, const char* format, char** out);
/* Writes the formats selected in the config; dir is created if needed. */
SBM_API sbm_status sbm_report_write(const sbm_report* rep, const sbm_config* cfg, const char* dir);
SBM_API size_t sbm_report_table_count(const sbm_report* rep);
SBM_API const char* sbm_report_table_name(const sbm_report* rep, size_t i);
SBM_API void sbm_report_free(sbm_report* rep);
SBM_API void sbm_string_free(char* s);

SBM_API sbm_status sbm_spec_from_config(const sbm_config* cfg, sbm_spec** out);
SBM_API sbm_status sbm_spec_eval_f(const sbm_spec* spec, double lambda, double* out);
SBM_API sbm_status sbm_spec_mbar(const sbm_spec* spec, double* out);
/* Tr exp(-t f(-Laplacian)) by quadrature, direct normalization. */
SBM_API sbm_status sbm_spec_trace(const sbm_spec* spec, int n, double t, double* value, double* est_error);
SBM_API void sbm_spec_free(sbm_spec* spec);

#ifdef __cplusplus
}
#endif

#endif
