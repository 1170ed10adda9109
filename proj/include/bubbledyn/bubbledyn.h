/*
 * C interface to the bubbledyn commodity-price dynamics engine.
 *
 * Objects are opaque handles created by bd_* functions and released with the
 * matching bd_*_free. Every fallible call returns a bd_status; on failure
 * bd_last_error() holds a message for the calling thread until its next call.
 * Output pointers are written only on success.
 */
#ifndef BUBBLEDYN_H
#define BUBBLEDYN_H

#include <stddef.h>

#if defined(BUBBLEDYN_BUILDING_LIBRARY)
#define BD_API __attribute__((visibility("default")))
#else
#define BD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bd_status {
    BD_OK = 0,
    BD_ERR_INVALID_ARGUMENT = 1,
    BD_ERR_DOMAIN = 2,
    BD_ERR_DEGENERATE = 3,
    BD_ERR_ALIGNMENT = 4,
    BD_ERR_IO = 5,
    BD_ERR_PARSE = 6,
    BD_ERR_FIT = 7,
    BD_ERR_INTERNAL = 8
} bd_status;

typedef enum bd_frequency { BD_MONTHLY = 0, BD_ANNUAL = 1 } bd_frequency;
typedef enum bd_format { BD_FORMAT_CSV = 0, BD_FORMAT_JSON = 1 } bd_format;
typedef enum bd_transform { BD_TRANSFORM_NONE = 0, BD_TRANSFORM_INVERSE = 1 } bd_transform;

typedef enum bd_regime_label {
    BD_FIRST_ORDER_MONOTONE_CONVERGENT = 0,
    BD_FIRST_ORDER_MONOTONE_DIVERGENT = 1,
    BD_FIRST_ORDER_ALTERNATING = 2,
    BD_REAL_CONVERGENT = 3,
    BD_REAL_DIVERGENT = 4,
    BD_DAMPED_OSCILLATION = 5,
    BD_SUSTAINED_OSCILLATION = 6,
    BD_AMPLIFIED_OSCILLATION = 7,
    BD_REPEATED_ROOT_CONVERGENT = 8,
    BD_REPEATED_ROOT_DIVERGENT = 9
} bd_regime_label;

typedef struct bd_series bd_series;
typedef struct bd_grid bd_grid;
typedef struct bd_report bd_report;
typedef struct bd_text bd_text;

typedef struct bd_date {
    int year;
    int month;
} bd_date;

/* Half-open index range. */
typedef struct bd_window {
    size_t begin_index;
    size_t end_index;
} bd_window;

typedef struct bd_series_spec {
    const char* path;
    const char* date_column;  /* NULL selects "date" */
    const char* value_column; /* NULL selects "value" */
    bd_frequency frequency;
    const char* label; /* may be NULL */
    bd_transform transform;
} bd_series_spec;

typedef struct bd_speculator_params {
    double k_sd;
    double k_sp;
    double k_c;
} bd_speculator_params;

typedef struct bd_regime {
    double discriminant;
    double root_re[2];
    double root_im[2];
    double root_abs[2];
    int has_period; /* theta and period are valid only when nonzero */
    double theta;
    double period;
    bd_regime_label label;
    int convergent;
} bd_regime;

typedef struct bd_axis {
    double lo;
    double hi;
    int n;
} bd_axis;

typedef struct bd_sd_params {
    double lambda;
    double alpha_d;
    double beta_d;
    double alpha_s;
    double beta_s;
} bd_sd_params;

typedef struct bd_quadratic {
    double a;
    double b;
    double r_squared;
} bd_quadratic;

typedef struct bd_ethanol_link {
    double beta_sum;
    double alpha_d;
    double q_total;
} bd_ethanol_link;

typedef struct bd_combined_params {
    double k_sd;
    double k_sp;
    const double* couplings; /* one per market */
    size_t coupling_count;
    double trend_a;
    double trend_b;
    int switch_index;
} bd_combined_params;

typedef struct bd_combined_fit_options {
    const int* switch_candidates; /* indices into the food series */
    size_t switch_candidate_count;
    const bd_window* trend_excludes; /* food points left out of the trend refit */
    size_t trend_exclude_count;
    size_t seed;
} bd_combined_fit_options;

/* ---- diagnostics -------------------------------------------------------- */

BD_API const char* bd_last_error(void);
BD_API const char* bd_status_name(bd_status status);
BD_API const char* bd_version(void);

/* ---- text buffers ------------------------------------------------------- */

BD_API const char* bd_text_data(const bd_text* text);
BD_API size_t bd_text_size(const bd_text* text);
/* Writes the buffer to path; fails with BD_ERR_IO naming the path. */
BD_API bd_status bd_text_save(const bd_text* text, const char* path);
BD_API void bd_text_free(bd_text* text);

/* ---- series ------------------------------------------------------------- */

BD_API bd_status bd_series_create(bd_date start, bd_frequency frequency, const double* values, size_t count,
                                  const char* unit, bd_series** out);
BD_API bd_status bd_series_load(const bd_series_spec* spec, bd_series** out);
BD_API void bd_series_free(bd_series* series);
BD_API size_t bd_series_length(const bd_series* series);
BD_API bd_date bd_series_start(const bd_series* series);
BD_API bd_frequency bd_series_frequency(const bd_series* series);
/* Copies min(length, capacity) values. */
BD_API size_t bd_series_copy_values(const bd_series* series, double* out, size_t capacity);
/* Inclusive calendar clip. */
BD_API bd_status bd_series_between(const bd_series* series, bd_date first, bd_date last, bd_series** out);
/* Window of the inclusive calendar range [first, last] clipped to the series. */
BD_API bd_status bd_series_window(const bd_series* series, bd_date first, bd_date last, bd_window* out);
BD_API bd_status bd_series_render(const bd_series* series, bd_format format, bd_text** out);

/* ---- core statistics ---------------------------------------------------- */

BD_API bd_status bd_box_cox(double x, double lambda, double* out);
BD_API bd_status bd_inverse_box_cox(double y, double lambda, double* out);
BD_API bd_status bd_pearson(const bd_series* xs, const bd_series* ys, double* out);
/* Pearson rho on the series' common calendar span. */
BD_API bd_status bd_pearson_common(const bd_series* xs, const bd_series* ys, double* out);
BD_API bd_status bd_normalize_unit_interval(const bd_series* series, const bd_window* exclude, bd_series** out);
BD_API bd_status bd_lagged_cross_correlation(const bd_series* xs, const bd_series* ys, int max_lag,
                                             bd_report** out);
BD_API bd_status bd_deflate(const bd_series* nominal, const bd_series* cpi, bd_series** out);
BD_API bd_status bd_derive_surplus(const bd_series* production, const bd_series* consumption, bd_series** out);
BD_API bd_status bd_r_squared(const bd_series* observed, const bd_series* modeled, double* out);

/* ---- speculator dynamics ------------------------------------------------ */

BD_API bd_status bd_simulate_first_order(const bd_speculator_params* params, double p0, int steps, bd_date start,
                                         bd_series** out);
BD_API bd_status bd_simulate_second_order(const bd_speculator_params* params, double p0, double p1, int steps,
                                          bd_date start, bd_series** out);
BD_API bd_status bd_closed_form_first_order(const bd_speculator_params* params, double p_init, int t, double* out);
BD_API bd_status bd_closed_form_second_order(const bd_speculator_params* params, double p1_deviation, int t,
                                             double* out);
BD_API bd_status bd_classify(double k_sd, double k_sp, bd_regime* out);
BD_API const char* bd_regime_label_name(bd_regime_label label);

BD_API bd_status bd_phase_grid(bd_axis k_sd_axis, bd_axis k_sp_axis, bd_grid** out);
BD_API void bd_grid_free(bd_grid* grid);
BD_API size_t bd_grid_size(const bd_grid* grid);
BD_API bd_status bd_grid_node(const bd_grid* grid, size_t index, double* k_sd, double* k_sp, bd_regime* regime);
BD_API bd_status bd_grid_render(const bd_grid* grid, bd_format format, bd_text** out);

/* ---- supply and demand -------------------------------------------------- */

BD_API bd_status bd_sd_equilibrium(const bd_sd_params* params, double* price, double* quantity);
BD_API bd_status bd_simulate_equilibrium_path(const bd_series* surplus, const bd_sd_params* params,
                                              bd_report** out);
BD_API bd_status bd_fit_supply_demand(const bd_series* price, const bd_series* consumption,
                                      const bd_series* surplus, size_t seed, bd_report** out);

/* ---- ethanol shock ------------------------------------------------------ */

BD_API bd_status bd_quadratic_fit(const bd_series* series, const bd_window* exclude, bd_quadratic* out);
BD_API bd_status bd_implied_food_price(const bd_series* q_x, const bd_ethanol_link* link, bd_series** out);
BD_API bd_status bd_trend_comparison(const bd_series* a, const bd_series* b, const bd_window* exclude_b,
                                     bd_report** out);

/* ---- combined model ----------------------------------------------------- */

BD_API double bd_kc_of_t(double trend_a, double trend_b, double k_sd, int t);
BD_API bd_status bd_simulate_combined(const bd_combined_params* params, const bd_series* const* markets,
                                      size_t market_count, double p0, double p1, int steps, bd_series** out);
/* Refits the food trend without the excluded windows, then fits the model. */
BD_API bd_status bd_fit_combined(const bd_series* food, const bd_series* const* markets, size_t market_count,
                                 const bd_combined_fit_options* options, bd_report** out);

/* ---- reports ------------------------------------------------------------ */

/* Looks up a number by JSON pointer, e.g. "/parameters/k_sd". */
BD_API bd_status bd_report_number(const bd_report* report, const char* pointer, double* out);
/* Looks up a string by JSON pointer, e.g. "/regime". Valid until the report is freed. */
BD_API bd_status bd_report_string(const bd_report* report, const char* pointer, const char** out);
/* A series stored in the report, e.g. "/path". */
BD_API bd_status bd_report_series(const bd_report* report, const char* pointer, bd_series** out);
/* JSON: the full report. CSV: the report's tabular view (path, residuals, lags). */
BD_API bd_status bd_report_render(const bd_report* report, bd_format format, bd_text** out);
BD_API void bd_report_free(bd_report* report);

#ifdef __cplusplus
}
#endif

#endif /* BUBBLEDYN_H */
