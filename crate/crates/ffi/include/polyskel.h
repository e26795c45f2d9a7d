#ifndef POLYSKEL_H
#define POLYSKEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_ARGUMENT = 2,
  PS_STATUS_CONFIG = 3,
  PS_STATUS_DIMENSION_MISMATCH = 4,
  PS_STATUS_GEOMETRY = 5,
  PS_STATUS_NOT_CONVERGED = 6,
  PS_STATUS_IO = 7,
  PS_STATUS_PARSE = 8,
  PS_STATUS_PANIC = 9,
} PsStatus;

/*
 Cell complex.
 */
typedef struct PsComplex PsComplex;

/*
 Parsed and validated problem.
 */
typedef struct PsProblem PsProblem;

/*
 Result of a minimizing run.
 */
typedef struct PsReport PsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *ps_version(void);

/*
 Message of the last failed call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *ps_last_error_message(void);

/*
 Frees a string returned by this library.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void ps_string_free(char *s);

/*
 Block of `counts[i]` cubes of side `stride` per axis from `origin`, in
 dimension `n` (2 or 3). `origin` and `counts` hold `n` entries.

 # Safety
 `origin` and `counts` must point to `n` readable values.
 */
enum PsStatus ps_complex_dyadic(size_t n,
                                double stride,
                                const double *origin,
                                const size_t *counts,
                                struct PsComplex **out);

/*
 # Safety
 `c` must come from `ps_complex_dyadic` and not be freed twice.
 */
void ps_complex_free(struct PsComplex *c);

/*
 Number of top-dimensional cells.

 # Safety
 `c` must be a live handle.
 */
enum PsStatus ps_complex_cell_count(const struct PsComplex *c, size_t *out);

/*
 Number of faces of dimension `dim`.

 # Safety
 `c` must be a live handle.
 */
enum PsStatus ps_complex_face_count(const struct PsComplex *c, size_t dim, size_t *out);

/*
 Smallest rotondity over all faces.

 # Safety
 `c` must be a live handle.
 */
enum PsStatus ps_complex_min_rotondity(const struct PsComplex *c, double *out);

/*
 Checks that face relative interiors are pairwise disjoint.

 # Safety
 `c` must be a live handle.
 */
enum PsStatus ps_complex_validate(const struct PsComplex *c, bool *out_valid);

/*
 Parses a problem from TOML text.

 # Safety
 `text` must be a NUL-terminated string.
 */
enum PsStatus ps_problem_from_toml(const char *text, struct PsProblem **out);

/*
 Replaces the problem's seed.

 # Safety
 `p` must be a live handle.
 */
enum PsStatus ps_problem_set_seed(struct PsProblem *p, uint64_t seed);

/*
 # Safety
 `p` must come from `ps_problem_from_toml` and not be freed twice.
 */
void ps_problem_free(struct PsProblem *p);

/*
 Runs the minimizing sequence. A run that does not converge still
 produces a report; check `ps_report_converged`.

 # Safety
 `p` must be a live handle.
 */
enum PsStatus ps_minimize(const struct PsProblem *p, struct PsReport **out);

/*
 # Safety
 `r` must come from `ps_minimize` and not be freed twice.
 */
void ps_report_free(struct PsReport *r);

/*
 Weighted measure of the final skeleton.

 # Safety
 `r` must be a live handle.
 */
enum PsStatus ps_report_final_value(const struct PsReport *r, double *out);

/*
 # Safety
 `r` must be a live handle.
 */
enum PsStatus ps_report_stride_count(const struct PsReport *r, size_t *out);

/*
 Stride length and optimized value at stride `index`.

 # Safety
 `r` must be a live handle.
 */
enum PsStatus ps_report_stride(const struct PsReport *r,
                               size_t index,
                               double *out_stride,
                               double *out_value);

/*
 # Safety
 `r` must be a live handle.
 */
enum PsStatus ps_report_converged(const struct PsReport *r, bool *out);

/*
 Whether the final skeleton satisfies the problem's constraint.

 # Safety
 `r` must be a live handle.
 */
enum PsStatus ps_report_oracle_holds(const struct PsReport *r, bool *out);

/*
 The report as JSON lines; release with `ps_string_free`.

 # Safety
 `r` must be a live handle.
 */
enum PsStatus ps_report_to_json(const struct PsReport *r, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYSKEL_H */
