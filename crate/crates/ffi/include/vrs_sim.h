#ifndef VRS_SIM_H
#define VRS_SIM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum VrsStatus {
  VRS_STATUS_OK = 0,
  VRS_STATUS_NULL_POINTER = 1,
  VRS_STATUS_INVALID_UTF8 = 2,
  // Unparseable or out-of-range configuration.
  VRS_STATUS_CONFIG_ERROR = 3,
  // Singular system or failed numerical procedure.
  VRS_STATUS_NUMERIC_ERROR = 4,
  // The caller's buffer is shorter than required; the required length is
  // reported through the length output.
  VRS_STATUS_BUFFER_TOO_SMALL = 5,
  VRS_STATUS_INVALID_ARGUMENT = 6,
  VRS_STATUS_PANIC = 7,
} VrsStatus;

// Columns of a computed spectrum.
typedef enum VrsChannel {
  // Frequency grid (µeV).
  VRS_CHANNEL_OMEGA = 0,
  VRS_CHANNEL_CAVITY = 1,
  VRS_CHANNEL_EMITTER = 2,
  VRS_CHANNEL_INTERFERENCE1 = 3,
  VRS_CHANNEL_INTERFERENCE2 = 4,
  VRS_CHANNEL_TOTAL = 5,
  VRS_CHANNEL_TOTAL_CONVOLVED = 6,
} VrsChannel;

// Run configuration: physics, detection geometry and grid.
typedef struct VrsConfig VrsConfig;

// Detected spectrum on its frequency grid.
typedef struct VrsSpectrum VrsSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or an empty string.
// The pointer stays valid until the next failing call on this thread.
const char *vrs_last_error_message(void);

// Configuration with the measured parameter set. Never NULL.
struct VrsConfig *vrs_config_default(void);

// Parses INI text (sections `physics`, `detection`, `grid`, `run`).
//
// # Safety
// `text` is a NUL-terminated string; `out` is writable.
enum VrsStatus vrs_config_from_str(const char *text, struct VrsConfig **out);

// Sets a numeric parameter named `section.key`, e.g. `physics.kappa` or
// `detection.theta_proj`. `physics.g` recalibrates `g_tilde` to the given
// effective coupling. The configuration is unchanged unless the result
// validates.
//
// # Safety
// `cfg` is a live handle; `key` is a NUL-terminated string.
enum VrsStatus vrs_config_set(struct VrsConfig *cfg, const char *key, double value);

// Canonical INI text of `cfg`, NUL-terminated. `*len` receives the
// required size including the terminator; with `buf` NULL or too short,
// nothing is written and [`VrsStatus::BufferTooSmall`] is returned.
//
// # Safety
// `cfg` is a live handle; `buf` is NULL or writable for `cap` bytes; `len`
// is writable.
enum VrsStatus vrs_config_to_string(const struct VrsConfig *cfg,
                                    char *buf,
                                    size_t cap,
                                    size_t *len);

// Effective coupling |g| (µeV) of the configured geometry.
//
// # Safety
// `cfg` is a live handle; `out` is writable.
enum VrsStatus vrs_effective_g(const struct VrsConfig *cfg, double *out);

// # Safety
// `cfg` is NULL or a handle from this library not yet freed.
void vrs_config_free(struct VrsConfig *cfg);

// Detected spectrum for the configured parameters on the configured grid.
//
// # Safety
// `cfg` is a live handle; `out` is writable.
enum VrsStatus vrs_spectrum_compute(const struct VrsConfig *cfg, struct VrsSpectrum **out);

// Number of grid points; 0 for NULL.
//
// # Safety
// `s` is NULL or a live handle.
size_t vrs_spectrum_len(const struct VrsSpectrum *s);

// Copies one column into `buf`. `*len` receives the column length; with
// `cap` shorter than that, nothing is copied and
// [`VrsStatus::BufferTooSmall`] is returned.
//
// # Safety
// `s` is a live handle; `buf` is NULL or writable for `cap` doubles; `len`
// is writable.
enum VrsStatus vrs_spectrum_channel(const struct VrsSpectrum *s,
                                    enum VrsChannel channel,
                                    double *buf,
                                    size_t cap,
                                    size_t *len);

// # Safety
// `s` is NULL or a handle from this library not yet freed.
void vrs_spectrum_free(struct VrsSpectrum *s);

// Closed-form cavity- and emitter-channel splittings (µeV).
//
// # Safety
// `cavity` and `emitter` are writable.
enum VrsStatus vrs_cui_raymer(double g,
                              double kappa,
                              double gamma,
                              double *cavity,
                              double *emitter);

// Projection angle Θ (degrees, [0, 180)) selected by a half-wave-plate
// angle α.
double vrs_hwp_to_theta(double alpha_deg);

// Crate version, NUL-terminated, static.
const char *vrs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VRS_SIM_H */
