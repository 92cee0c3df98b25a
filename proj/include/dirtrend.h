/* dirtrend — directional trend estimation on the sphere.
 *
 * C interface to the shared library. All functions return a dt_status;
 * outputs come back through pointer arguments. Objects are opaque handles
 * released with the matching *_free function. Strings returned through
 * char** are owned by the caller and released with dt_string_free.
 *
 * On failure the thread-local message from dt_last_error() describes what
 * went wrong.
 */

#ifndef DIRTREND_H
#define DIRTREND_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dt_status {
  DT_OK = 0,
  DT_ERR_INVALID_ARGUMENT = 1,
  DT_ERR_PARSE = 2,
  DT_ERR_IO = 3,
  DT_ERR_DIMENSION = 4,
  DT_ERR_DEGENERATE_ROW = 5,
  DT_ERR_NO_CONVERGENCE = 6,
  DT_ERR_DOMAIN = 7,
  DT_ERR_UNKNOWN = 8
} dt_status;

/* Library version string, e.g. "0.1.0". */
const char* dt_version(void);

/* Message describing the most recent failure on this thread. */
const char* dt_last_error(void);

void dt_string_free(char* s);

/* ------------------------------------------------------------------ *
 * Datasets: time-ordered unit directions in R^3.
 * ------------------------------------------------------------------ */

typedef struct dt_dataset dt_dataset;

/* Parse the CSV schema "time,theta,phi" (radians) or, with degrees != 0,
 * "time,lat,lon". Rows are sorted by time. warnings (optional) receives a
 * newline-joined diagnostic string, or NULL when the parse was clean. */
dt_status dt_dataset_from_csv(const char* text, int degrees, dt_dataset** out,
                              char** warnings);
dt_status dt_dataset_from_csv_file(const char* path, int degrees,
                                   dt_dataset** out, char** warnings);

/* Build a dataset from arrays of angles (radians). times may be NULL, in
 * which case rows are numbered 1..p. */
dt_status dt_dataset_create(long p, const double* times, const double* theta,
                            const double* phi, dt_dataset** out);

long dt_dataset_rows(const dt_dataset* ds);
dt_status dt_dataset_get(const dt_dataset* ds, long row, double* time,
                         double* theta, double* phi);

/* Serialize back to the ingest schema (12 significant digits). */
dt_status dt_dataset_to_csv(const dt_dataset* ds, int degrees, char** out);

/* Dispersion estimate gamma^2 from first differences of the rows. */
dt_status dt_dataset_gamma2hat(const dt_dataset* ds, double* out);

void dt_dataset_free(dt_dataset* ds);

/* ------------------------------------------------------------------ *
 * Synthetic data.
 * ------------------------------------------------------------------ */

typedef struct dt_trend dt_trend;

/* name is one of "wobble", "bat", "jumps". */
dt_status dt_trend_builtin(const char* name, dt_trend** out);

/* JSON document {"label":str, "points":[{"t":..,"theta":..,"phi":..},..]}
 * interpolated linearly in t. */
dt_status dt_trend_from_json(const char* text, dt_trend** out);

void dt_trend_free(dt_trend* trend);

/* Draw p noisy directions along the trend with Fisher-Langevin noise of the
 * given precision. truth receives the exact mean directions; lambda/gamma2
 * (optional) receive the Monte Carlo moments of the noise law. */
dt_status dt_simulate(const dt_trend* trend, long p, double kappa,
                      uint64_t seed, dt_dataset** data, dt_dataset** truth,
                      double* lambda, double* gamma2);

/* ------------------------------------------------------------------ *
 * Candidate smoother families.
 * ------------------------------------------------------------------ */

typedef struct dt_family dt_family;

/* d-th difference penalized least squares family, penalty scale c. */
dt_status dt_family_pls(long p, int d, double c, dt_family** out);

/* One-parameter running weighted average family. */
dt_status dt_family_running_weighted(long p, dt_family** out);

/* Fixed span-3 running average candidate. */
dt_status dt_family_span3(long p, dt_family** out);

const char* dt_family_label(const dt_family* family);

void dt_family_free(dt_family* family);

/* ------------------------------------------------------------------ *
 * Risk tables and fits.
 * ------------------------------------------------------------------ */

typedef struct dt_report dt_report;

typedef struct dt_selection_config {
  int grid_points_per_axis; /* >= 2; 0 selects the default 201 */
  int refine;               /* nonzero enables local refinement */
  double refine_tolerance;  /* <= 0 selects the default 1e-6 */
} dt_selection_config;

/* Estimated-risk table over the candidate families (the span-3 candidate and
 * the naive baseline are included automatically). config may be NULL. */
dt_status dt_risk_table(const dt_dataset* ds, const dt_family* const* families,
                        long n_families, const dt_selection_config* config,
                        dt_report** out);

/* Risk table plus the fitted directions of the top-ranked candidate. */
dt_status dt_fit(const dt_dataset* ds, const dt_family* const* families,
                 long n_families, const dt_selection_config* config,
                 dt_report** report, dt_dataset** fitted);

double dt_report_gamma2hat(const dt_report* report);
double dt_report_naive_risk(const dt_report* report);
long dt_report_entry_count(const dt_report* report);
const char* dt_report_entry_label(const dt_report* report, long index);
dt_status dt_report_entry_risk(const dt_report* report, long index,
                               double* out);
/* Selected parameter of entry `index`; t must hold up to 3 doubles. */
dt_status dt_report_entry_param(const dt_report* report, long index, double* t,
                                int* dim);
/* Ranked labels, ascending estimated risk; index 0 is the winner. The naive
 * baseline appears under the label "naive". */
long dt_report_ranking_count(const dt_report* report);
const char* dt_report_ranking_label(const dt_report* report, long index);

dt_status dt_report_to_json(const dt_report* report, char** out);

void dt_report_free(dt_report* report);

/* ------------------------------------------------------------------ *
 * Lambert plots.
 * ------------------------------------------------------------------ */

typedef struct dt_plot dt_plot;

dt_status dt_plot_new(int width_px, int height_px, int connect, dt_plot** out);
dt_status dt_plot_add_series(dt_plot* plot, const char* label,
                             const dt_dataset* ds);
dt_status dt_plot_render(const dt_plot* plot, char** svg_out);
void dt_plot_free(dt_plot* plot);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DIRTREND_H */
