#ifndef QHT_H
#define QHT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum QhtStatus {
  QHT_STATUS_OK = 0,
  QHT_STATUS_NULL_POINTER = 1,
  QHT_STATUS_INVALID_ARGUMENT = 2,
  QHT_STATUS_UNPHYSICAL_NOISE = 3,
  QHT_STATUS_CONFIG = 4,
  QHT_STATUS_DEGENERATE_HYPOTHESES = 5,
  QHT_STATUS_NUMERICAL = 6,
  QHT_STATUS_IO = 7,
  QHT_STATUS_PANIC = 8,
} QhtStatus;

/**
 * Opaque scenario handle.
 */
typedef struct QhtScenario QhtScenario;

/**
 * Opaque time-series handle.
 */
typedef struct QhtTimeSeries QhtTimeSeries;

/**
 * One row of a time series.
 */
typedef struct QhtSample {
  double t_s;
  double p_noisy;
  double p_unitary;
  double p_unitary_ceiling;
  double trace_distance_noisy;
  double trace_distance_unitary;
} QhtSample;

typedef struct QhtConditions {
  double x1;
  double y1;
  double z1;
  double w1;
  double lambda_max;
  double lambda_min;
  bool cond1;
  bool cond2;
  bool degenerate;
  bool near_boundary;
} QhtConditions;

typedef struct QhtEnhancement {
  double eta;
  double t_star_s;
  bool exceeds_unitary_max;
  double eta_same_probe;
  double t_star_same_probe_s;
  double p_noisy_max;
  double t_noisy_max_s;
  double unitary_max;
  double unitary_ceiling_max;
  bool exceeds_same_probe_max;
} QhtEnhancement;

typedef struct QhtChernoff {
  double s_star;
  double q_star;
  /**
   * `+inf` when `q_star` is numerically zero.
   */
  double exponent;
} QhtChernoff;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *qht_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qht_version(void);

/**
 * Builds a scenario from TOML config text (same format as the CLI).
 *
 * # Safety
 * `toml` is a NUL-terminated UTF-8 string; `out` is writable.
 */
enum QhtStatus qht_scenario_from_config(const char *toml, struct QhtScenario **out);

/**
 * Tilted-field reference scenario at T1 = 5.5 s.
 *
 * # Safety
 * `out` is writable.
 */
enum QhtStatus qht_scenario_fig3(double t2, struct QhtScenario **out);

/**
 * Control-field reference scenario at T1 = 7.4 s.
 *
 * # Safety
 * `out` is writable.
 */
enum QhtStatus qht_scenario_fig4(double t2, double bc_nt, struct QhtScenario **out);

/**
 * Replaces the time grid of a scenario.
 *
 * # Safety
 * `scenario` is a live handle.
 */
enum QhtStatus qht_scenario_set_grid(struct QhtScenario *scenario, double horizon_s, size_t points);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `scenario` is null or a handle not yet freed.
 */
void qht_scenario_free(struct QhtScenario *scenario);

/**
 * Computes the success-probability curves on the scenario's grid.
 *
 * # Safety
 * `scenario` is a live handle; `out` is writable.
 */
enum QhtStatus qht_success_curve(const struct QhtScenario *scenario, struct QhtTimeSeries **out);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `series` is null or a live handle.
 */
size_t qht_series_len(const struct QhtTimeSeries *series);

/**
 * Copies sample `index` into `out`.
 *
 * # Safety
 * `series` is a live handle; `out` is writable.
 */
enum QhtStatus qht_series_get(const struct QhtTimeSeries *series,
                              size_t index,
                              struct QhtSample *out);

/**
 * Releases a time series. Null is ignored.
 *
 * # Safety
 * `series` is null or a handle not yet freed.
 */
void qht_series_free(struct QhtTimeSeries *series);

/**
 * Evaluates the two early-advantage conditions.
 *
 * # Safety
 * `scenario` is a live handle; `out` is writable.
 */
enum QhtStatus qht_check_conditions(const struct QhtScenario *scenario, struct QhtConditions *out);

/**
 * Enhancement of the noisy curve over the unitary bound.
 *
 * # Safety
 * `scenario` is a live handle; `out` is writable.
 */
enum QhtStatus qht_enhancement(const struct QhtScenario *scenario, struct QhtEnhancement *out);

/**
 * Success-probability plateau under dominant dephasing for field angles
 * `theta0_deg` and `theta1_deg`.
 */
double qht_strong_dephasing_limit(double theta0_deg, double theta1_deg);

/**
 * Quantum Chernoff quantity of two qubit states given by Bloch vectors.
 *
 * # Safety
 * `bloch0` and `bloch1` point to three doubles each; `out` is writable.
 */
enum QhtStatus qht_chernoff(const double *bloch0, const double *bloch1, struct QhtChernoff *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHT_H */
