#ifndef RYDBERG_CZ_H
#define RYDBERG_CZ_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Figure of merit selectable through [`rcz_gate_result_fidelity`].
 */
typedef enum RczMeasure {
  /**
   * Square root of the superposition-state overlap.
   */
  RCZ_MEASURE_PHASE_ROOT = 0,
  /**
   * Superposition-state overlap.
   */
  RCZ_MEASURE_PHASE_SQUARED = 1,
  /**
   * Mean of the square roots of the four return fidelities.
   */
  RCZ_MEASURE_TRUTH_TABLE_SQRT_TRACE = 2,
  /**
   * Mean of the four return fidelities.
   */
  RCZ_MEASURE_TRUTH_TABLE_AVERAGE = 3,
} RczMeasure;

/**
 * Result of every fallible call.
 */
typedef enum RczStatus {
  RCZ_STATUS_OK = 0,
  RCZ_STATUS_NULL_POINTER = 1,
  RCZ_STATUS_INVALID_ARGUMENT = 2,
  RCZ_STATUS_INTEGRATOR = 3,
  RCZ_STATUS_IO = 4,
  RCZ_STATUS_INTERNAL = 5,
  RCZ_STATUS_PANIC = 6,
} RczStatus;

/**
 * Opaque run configuration.
 */
typedef struct RczConfig RczConfig;

/**
 * Opaque simulation result.
 */
typedef struct RczGateResult RczGateResult;

/**
 * Opaque pulse parameters.
 */
typedef struct RczPulse RczPulse;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rcz_version(void);

/**
 * Copies the last error message of the calling thread into `buf` (truncated
 * and always NUL-terminated when `len > 0`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t rcz_last_error(char *buf, size_t len);

/**
 * Creates a pulse from a preset name (`to`, `to_printed`, `der`,
 * `der_i_gauss`, `der_i_uniform`).
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RczStatus rcz_pulse_preset(const char *name, struct RczPulse **out);

/**
 * Creates a pulse from its timing (μs) with the default amplitudes,
 * intermediate detuning and blockade.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RczStatus rcz_pulse_custom(double t1, double t2, double width, struct RczPulse **out);

/**
 * Writes `(t1, t2, width)` in μs to `out[0..3]`.
 *
 * # Safety
 * `pulse` must come from this library; `out` must hold 3 doubles.
 */
enum RczStatus rcz_pulse_timing(const struct RczPulse *pulse, double *out);

/**
 * Gate duration in μs, or NaN for a null handle.
 *
 * # Safety
 * `pulse` must be null or come from this library.
 */
double rcz_pulse_gate_time(const struct RczPulse *pulse);

/**
 * # Safety
 * `pulse` must be null or a handle from this library not yet freed.
 */
void rcz_pulse_free(struct RczPulse *pulse);

/**
 * Simulates the gate under a static two-photon detuning error.
 *
 * # Safety
 * `pulse` must come from this library and `out` be a valid pointer.
 */
enum RczStatus rcz_simulate(const struct RczPulse *pulse,
                            double eps_delta_mhz,
                            bool with_decay,
                            struct RczGateResult **out);

/**
 * Writes the return fidelities of `|00>, |01>, |10>, |11>` to `out[0..4]`.
 *
 * # Safety
 * `res` must come from this library; `out` must hold 4 doubles.
 */
enum RczStatus rcz_gate_result_truth_table(const struct RczGateResult *res, double *out);

/**
 * Writes the phases `φ01, φ10, φ11` in radians to `out[0..3]`.
 *
 * # Safety
 * `res` must come from this library; `out` must hold 3 doubles.
 */
enum RczStatus rcz_gate_result_phases(const struct RczGateResult *res, double *out);

/**
 * # Safety
 * `res` must come from this library and `out` be a valid pointer.
 */
enum RczStatus rcz_gate_result_fidelity(const struct RczGateResult *res,
                                        enum RczMeasure measure,
                                        double *out);

/**
 * # Safety
 * `res` must be null or a handle from this library not yet freed.
 */
void rcz_gate_result_free(struct RczGateResult *res);

/**
 * Parses a TOML run configuration (the format accepted by the command-line tool).
 *
 * # Safety
 * `toml` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RczStatus rcz_config_parse(const char *toml, struct RczConfig **out);

/**
 * # Safety
 * `cfg` must be null or a handle from this library not yet freed.
 */
void rcz_config_free(struct RczConfig *cfg);

/**
 * Monte-Carlo average of the configured fidelity measure over the
 * configured noise model, pulse and decay setting.
 *
 * # Safety
 * `cfg` must come from this library; the output pointers must be valid.
 */
enum RczStatus rcz_monte_carlo(const struct RczConfig *cfg,
                               double *mean,
                               double *stderr,
                               size_t *n_failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RYDBERG_CZ_H */
