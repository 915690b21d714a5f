#ifndef GOLOMB_RMT_H
#define GOLOMB_RMT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes. Zero is success.
 */
typedef enum {
  GRM_STATUS_OK = 0,
  GRM_STATUS_NULL_POINTER = 1,
  GRM_STATUS_INVALID_UTF8 = 2,
  GRM_STATUS_PARSE = 3,
  GRM_STATUS_DOMAIN = 4,
  GRM_STATUS_CAPABILITY = 5,
  GRM_STATUS_DEGENERATE_SEED = 6,
  GRM_STATUS_PERIOD_MISMATCH = 7,
  GRM_STATUS_NOT_M_SEQUENCE = 8,
  GRM_STATUS_NO_CONVERGENCE = 9,
  GRM_STATUS_VERIFICATION = 10,
  GRM_STATUS_IO = 11,
  GRM_STATUS_BUFFER_TOO_SMALL = 12,
  GRM_STATUS_PANIC = 13,
} GrmStatus;

/**
 * Opaque m-sequence.
 */
typedef struct GrmSequence GrmSequence;

/**
 * Opaque ascending eigenvalue list.
 */
typedef struct GrmSpectrum GrmSpectrum;

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`) and returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t grm_last_error(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *grm_version(void);

/**
 * Generates one period of the m-sequence of `poly` (e.g. `"x^5+x^2+1"`)
 * from `seed` (a bit string or `"ones"`).
 *
 * # Safety
 * `poly` and `seed` must be NUL-terminated strings; `out` must be writable.
 */
GrmStatus grm_sequence_new(const char *poly, const char *seed, GrmSequence **out);

/**
 * # Safety
 * `s` must be null or a handle from [`grm_sequence_new`] not yet freed.
 */
void grm_sequence_free(GrmSequence *s);

/**
 * Period length, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live sequence handle.
 */
size_t grm_sequence_len(const GrmSequence *s);

/**
 * Writes the period as 0/1 bytes into `out`.
 *
 * # Safety
 * `s` must be a live handle and `out` must point to `cap` writable bytes.
 */
GrmStatus grm_sequence_bits(const GrmSequence *s, uint8_t *out, size_t cap);

/**
 * Runs the full randomness battery; `*pass` is true when every check passes.
 *
 * # Safety
 * `s` must be a live handle and `pass` writable.
 */
GrmStatus grm_sequence_battery(const GrmSequence *s, bool *pass);

/**
 * Berlekamp-Massey linear complexity of `len` bytes, each 0 or 1.
 *
 * # Safety
 * `bits` must point to `len` readable bytes and `out` must be writable.
 */
GrmStatus grm_linear_complexity(const uint8_t *bits, size_t len, size_t *out);

/**
 * Spectrum of the circulant `sign * A_n(shift)` built from `s`.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
GrmStatus grm_pseudo_spectrum(const GrmSequence *s, size_t shift, int8_t sign, GrmSpectrum **out);

/**
 * Spectrum of the matrix described by a JSON ensemble spec, e.g.
 * `{"family":"wigner","n":64,"rng_seed":1,"stream":0}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
GrmStatus grm_spectrum_from_spec(const char *json, GrmSpectrum **out);

/**
 * # Safety
 * `sp` must be null or a spectrum handle not yet freed.
 */
void grm_spectrum_free(GrmSpectrum *sp);

/**
 * Number of eigenvalues, or 0 for a null handle.
 *
 * # Safety
 * `sp` must be null or a live spectrum handle.
 */
size_t grm_spectrum_len(const GrmSpectrum *sp);

/**
 * Copies the ascending eigenvalues into `out`.
 *
 * # Safety
 * `sp` must be a live handle and `out` must point to `cap` writable doubles.
 */
GrmStatus grm_spectrum_values(const GrmSpectrum *sp, double *out, size_t cap);

/**
 * `(1/n) sum lambda^r`.
 *
 * # Safety
 * `sp` must be a live handle and `out` writable.
 */
GrmStatus grm_spectrum_moment(const GrmSpectrum *sp, uint32_t r, double *out);

/**
 * Kolmogorov-Smirnov distance to the semicircle law on `[-1, 1]`.
 *
 * # Safety
 * `sp` must be a live handle and `out` writable.
 */
GrmStatus grm_spectrum_ks_semicircle(const GrmSpectrum *sp, double *out);

#endif  /* GOLOMB_RMT_H */
