#ifndef CUBICAL_H
#define CUBICAL_H

/* Generated by cbindgen from cubical-capi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Certificate-producing calls use the process exit-code
 * convention for verdicts; `CCX_ERROR` means the inputs were unusable.
 */
#define CCX_OK 0

#define CCX_FAIL 1

#define CCX_INCONCLUSIVE 2

#define CCX_ERROR 3

/**
 * Opaque certificate handle.
 */
typedef struct CcxCert CcxCert;

/**
 * Opaque cube complex handle.
 */
typedef struct CcxComplex CcxComplex;

/**
 * Opaque cubical map handle.
 */
typedef struct CcxMap CcxMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the most recent failure on this thread, or null.
 * The pointer is owned by the library and valid until the next failing
 * call on the same thread; do not free it.
 */
const char *ccx_last_error(void);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library and not
 * yet freed (null is ignored).
 */
void ccx_string_free(char *s);

/**
 * Parses a complex from its canonical text serialization.
 * Returns null on error.
 */
struct CcxComplex *ccx_complex_parse(const char *text);

/**
 * A wedge of `rank` loops at one vertex.
 */
struct CcxComplex *ccx_complex_bouquet(uintptr_t rank);

/**
 * A cycle of length `n` (returns null for n < 1).
 */
struct CcxComplex *ccx_complex_cycle(uint32_t n);

/**
 * Canonical text serialization; free with `ccx_string_free`.
 *
 * # Safety
 * `x` must be a live complex handle from this library.
 */
char *ccx_complex_serialize(const struct CcxComplex *x);

/**
 * Number of cells in each dimension; writes up to `len` entries and
 * returns the dimension + 1 (the number of entries available).
 *
 * # Safety
 * `x` must be a live complex handle; `out` must point to `len` writable
 * entries (or be null when `len` is 0).
 */
uintptr_t ccx_complex_cell_counts(const struct CcxComplex *x, uintptr_t *out, uintptr_t len);

/**
 * # Safety
 * `x` must be a handle from this library, freed at most once (null is
 * ignored).
 */
void ccx_complex_free(struct CcxComplex *x);

/**
 * Parses a map (with embedded source and target) from its canonical
 * text serialization. Returns null on error.
 */
struct CcxMap *ccx_map_parse(const char *text);

/**
 * Canonical text serialization; free with `ccx_string_free`.
 *
 * # Safety
 * `f` must be a live map handle from this library.
 */
char *ccx_map_serialize(const struct CcxMap *f);

/**
 * # Safety
 * `f` must be a handle from this library, freed at most once (null is
 * ignored).
 */
void ccx_map_free(struct CcxMap *f);

/**
 * Verdict of a certificate: CCX_OK pass, CCX_FAIL fail,
 * CCX_INCONCLUSIVE inconclusive.
 *
 * # Safety
 * `c` must be a live certificate handle from this library.
 */
int32_t ccx_cert_status(const struct CcxCert *c);

/**
 * The rendered certificate report; free with `ccx_string_free`.
 *
 * # Safety
 * `c` must be a live certificate handle from this library.
 */
char *ccx_cert_render(const struct CcxCert *c);

/**
 * # Safety
 * `c` must be a handle from this library, freed at most once (null is
 * ignored).
 */
void ccx_cert_free(struct CcxCert *c);

/**
 * Structural and curvature validation. Returns null on unusable input.
 *
 * # Safety
 * `x` must be a live complex handle from this library.
 */
struct CcxCert *ccx_validate(const struct CcxComplex *x);

/**
 * Hyperplane census certificate.
 *
 * # Safety
 * `x` must be a live complex handle from this library.
 */
struct CcxCert *ccx_hyperplanes(const struct CcxComplex *x);

/**
 * Pseudograph certificate: every hyperplane is a contractible tree.
 *
 * # Safety
 * `x` must be a live complex handle from this library.
 */
struct CcxCert *ccx_pseudograph(const struct CcxComplex *x);

/**
 * Local isometry certificate for a map.
 *
 * # Safety
 * `f` must be a live map handle from this library.
 */
struct CcxCert *ccx_local_isometry(const struct CcxMap *f);

/**
 * Superconvexity certificate at the given strip cutoff.
 *
 * # Safety
 * `f` must be a live map handle from this library.
 */
struct CcxCert *ccx_superconvex(const struct CcxMap *f, uint32_t cutoff);

/**
 * Shortest essential loop length. Returns CCX_OK and writes the length
 * when decided, CCX_INCONCLUSIVE and writes the proven lower bound when
 * the guard ran out, CCX_ERROR on unusable input.
 *
 * # Safety
 * `x` must be a live complex handle; `out_length` must be writable.
 */
int32_t ccx_systole(const struct CcxComplex *x, uint32_t guard, uint32_t *out_length);

/**
 * C'(alpha) certificate for the presentation whose base is the target
 * of the given relator maps (all relators must share one target).
 * `alpha = alpha_num / alpha_den`. Returns null on unusable input.
 *
 * # Safety
 * `relators` must point to `n` live map handles; each handle must be
 * live for the duration of the call.
 */
struct CcxCert *ccx_cprime(const struct CcxMap *const *relators,
                           uintptr_t n,
                           int64_t alpha_num,
                           int64_t alpha_den,
                           uint32_t guard);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUBICAL_H */
