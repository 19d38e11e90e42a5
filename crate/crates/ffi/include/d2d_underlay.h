#ifndef D2D_UNDERLAY_H
#define D2D_UNDERLAY_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum D2dStatus {
  D2D_STATUS_OK = 0,
  D2D_STATUS_NULL_POINTER = 1,
  D2D_STATUS_INVALID_UTF8 = 2,
  D2D_STATUS_INVALID_CONFIG = 3,
  D2D_STATUS_DOMAIN = 4,
  D2D_STATUS_UNSUPPORTED_ORDER = 5,
  D2D_STATUS_NON_CONVERGENCE = 6,
  D2D_STATUS_UNDEFINED_METRIC = 7,
  D2D_STATUS_BRACKET_FAILURE = 8,
  D2D_STATUS_INSUFFICIENT_SAMPLES = 9,
  D2D_STATUS_IO = 10,
  D2D_STATUS_PANIC = 11,
  D2D_STATUS_BUFFER_TOO_SMALL = 12,
} D2dStatus;

// Where an MGF is evaluated.
typedef enum D2dMgfTarget {
  D2D_MGF_TARGET_SINGLE_BS = 0,
  D2D_MGF_TARGET_AGGREGATE_BS = 1,
  D2D_MGF_TARGET_SINGLE_DRX = 2,
  D2D_MGF_TARGET_CUE_DRX = 3,
  D2D_MGF_TARGET_AGGREGATE_DRX = 4,
} D2dMgfTarget;

// Quantities the simulator estimates.
typedef enum D2dQuantity {
  D2D_QUANTITY_OUTAGE_BS = 0,
  D2D_QUANTITY_OUTAGE_DRX = 1,
  D2D_QUANTITY_M_BAR = 2,
  D2D_QUANTITY_M_BAR_D2D = 3,
  D2D_QUANTITY_TAU = 4,
  D2D_QUANTITY_PD2D = 5,
} D2dQuantity;

// Opaque configuration handle.
typedef struct D2dConfig D2dConfig;

typedef struct D2dEstimate {
  double mean;
  double ci_halfwidth;
  uint64_t n_samples;
} D2dEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// New configuration holding the default parameters. Free with
// `d2d_config_free`.
struct D2dConfig *d2d_config_new(void);

// # Safety
// `cfg` must come from `d2d_config_new` and not be used afterwards.
void d2d_config_free(struct D2dConfig *cfg);

// Set one key; `value` uses TOML syntax (`3.5`, `"quadrature"`, `[1, 2]`).
//
// # Safety
// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
enum D2dStatus d2d_config_set(struct D2dConfig *cfg, const char *key, const char *value);

// Apply every key of a TOML document.
//
// # Safety
// `cfg` must be a live handle; `toml` a NUL-terminated string.
enum D2dStatus d2d_config_load_toml(struct D2dConfig *cfg, const char *toml);

// Check the configuration without evaluating anything.
//
// # Safety
// `cfg` must be a live handle.
enum D2dStatus d2d_config_validate(const struct D2dConfig *cfg);

// BS outage at the configured SIR threshold.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum D2dStatus d2d_outage_bs(const struct D2dConfig *cfg, double *out);

// Outage at an admitted D2D receiver `d` metres from the BS.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum D2dStatus d2d_outage_drx(const struct D2dConfig *cfg, double d, double *out);

// Mean number of admitted D2D users per cell.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum D2dStatus d2d_avg_dues(const struct D2dConfig *cfg, double *out);

// Mean number of successful D2D links per cell.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum D2dStatus d2d_avg_successful_transmissions(const struct D2dConfig *cfg, double *out);

// Fraction of admitted D2D links that succeed.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum D2dStatus d2d_spectrum_reuse_ratio(const struct D2dConfig *cfg, double *out);

// Admission probability of a pair whose receiver is `d` from the BS.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum D2dStatus d2d_p_d2d(const struct D2dConfig *cfg, double d, double *out);

// Intensity of D2D receivers `d` from the BS.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum D2dStatus d2d_drx_density(const struct D2dConfig *cfg, double d, double *out);

// Largest `xi` (watts) whose BS outage equals `target`. When every user
// can be admitted without reaching it, `*saturated` is set to 1 and
// `*xi_out` to infinity.
//
// # Safety
// `cfg` must be a live handle; `xi_out` and `saturated` writable.
enum D2dStatus d2d_solve_xi(const struct D2dConfig *cfg,
                            double target,
                            double *xi_out,
                            uint8_t *saturated);

// MGF and its derivatives `d^k M / ds^k`, `k = 0..=order`, written to
// `out[0..=order]`. `d` is ignored for BS targets.
//
// # Safety
// `cfg` must be a live handle; `out` must hold `out_len` doubles.
enum D2dStatus d2d_mgf(const struct D2dConfig *cfg,
                       enum D2dMgfTarget target,
                       double s,
                       double d,
                       size_t order,
                       double *out,
                       size_t out_len);

// Monte Carlo estimate of `quantity`; `d` is the probe distance for the
// receiver-side quantities.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
enum D2dStatus d2d_estimate(const struct D2dConfig *cfg,
                            enum D2dQuantity quantity,
                            double d,
                            uint64_t n_realizations,
                            uint64_t seed,
                            struct D2dEstimate *out);

// Message of the last failed call on this thread, or an empty string.
// The pointer stays valid until the next failing call on the thread.
const char *d2d_last_error(void);

// Library version as a static string.
const char *d2d_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* D2D_UNDERLAY_H */
