/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef FOCKLEDGER_H
#define FOCKLEDGER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FL_OK 0

#define FL_NULL_POINTER 1

#define FL_ZERO_STATE 2

#define FL_INVALID_PARAMS 3

#define FL_INVALID_DISTRIBUTION 4

#define FL_CUTOFF_OVERFLOW 5

#define FL_NO_REAL_ROOT 6

#define FL_UNSUPPORTED 7

#define FL_PARSE 8

#define FL_UTF8 9

#define FL_BUFFER_TOO_SMALL 10

#define FL_PANIC 11

#define FL_OP_ANNIHILATE 0

#define FL_OP_CREATE 1

#define FL_OP_EXP_PHASE_DOWN 2

#define FL_OP_EXP_PHASE_UP 3

#define FL_CLASS_UNDEFINED -1

#define FL_CLASS_SUB_POISSONIAN 0

#define FL_CLASS_POISSONIAN 1

#define FL_CLASS_SUPER_POISSONIAN 2

#define FL_CLASS_SUPER_CHAOTIC 3

#define FL_CLASS_HYPER_POISSONIAN 4

// Opaque normalized state.
typedef struct FlState FlState;

// Statistics of a state. Quantities undefined for the vacuum are NaN and
// `klass` is `FL_CLASS_UNDEFINED`.
typedef struct FlStats {
  double mean;
  double variance;
  // n^(1) .. n^(4)
  double factorial_moments[4];
  double mandel_q;
  double g2;
  int32_t klass;
} FlStats;

// Closed-form means of the partner states; NaN where undefined.
typedef struct FlPredictions {
  double n_minus;
  double n_plus;
  double q_minus;
  double n_tilde_minus;
  double n_tilde_plus;
  double q_tilde;
} FlPredictions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a family member from its text spec, e.g. `"negbin:xi=0.5,mu=2"`.
// `tail_tol = 0` selects the default truncation tolerance.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a valid pointer.
int32_t fl_state_from_spec(const char *spec, double tail_tol, struct FlState **out);

// Normalizes `re[0..len] + i im[0..len]` into a state. `im` may be null
// for real amplitudes.
//
// # Safety
// `re` (and `im` when non-null) must point to `len` doubles.
int32_t fl_state_from_amplitudes(const double *re,
                                 const double *im,
                                 size_t len,
                                 struct FlState **out);

// Releases a handle; null is ignored.
//
// # Safety
// `state` must come from this library and not be freed twice.
void fl_state_free(struct FlState *state);

// Highest stored Fock index.
//
// # Safety
// Pointers must be valid or null.
int32_t fl_state_cutoff(const struct FlState *state, size_t *out);

// Copies the `cutoff + 1` amplitudes into `re` and `im`. `*needed` always
// receives the required length; a short buffer gives
// `FL_BUFFER_TOO_SMALL` and copies nothing.
//
// # Safety
// `re` and `im` must hold `len` doubles; `needed` must be valid.
int32_t fl_state_amplitudes(const struct FlState *state,
                            double *re,
                            double *im,
                            size_t len,
                            size_t *needed);

// Applies one `FL_OP_*` operator. The normalized image is a new handle;
// `norm_sq` (nullable) receives the squared norm before normalization.
//
// # Safety
// Pointers must be valid; `norm_sq` may be null.
int32_t fl_state_apply(const struct FlState *state,
                       int32_t op,
                       struct FlState **out,
                       double *norm_sq);

// # Safety
// Pointers must be valid.
int32_t fl_state_stats(const struct FlState *state, struct FlStats *out);

// # Safety
// Pointers must be valid.
int32_t fl_state_predictions(const struct FlState *state, struct FlPredictions *out);

// Runs the claim suite and returns the JSON report in `*out_json`.
// `filter` (nullable) restricts claims by id prefix; `draws = 0` selects
// the default number of random states per family. `*all_passed`
// (nullable) is set to 1 when nothing failed.
//
// # Safety
// `out_json` must be valid; free the string with `fl_string_free`.
int32_t fl_verify_json(const char *filter,
                       uint64_t seed,
                       size_t draws,
                       char **out_json,
                       int32_t *all_passed);

// # Safety
// `s` must come from this library or be null.
void fl_string_free(char *s);

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library on this thread.
const char *fl_last_error_message(void);

const char *fl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOCKLEDGER_H */
