#ifndef INVDECOMP_H
#define INVDECOMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum InvdStatus {
  INVD_STATUS_OK = 0,
  /**
   * A certificate was produced: star violation, dual certificate or
   * obstruction.
   */
  INVD_STATUS_VIOLATION = 1,
  INVD_STATUS_INPUT_ERROR = 2,
  INVD_STATUS_NOT_COMMUTING = 3,
  INVD_STATUS_NULL_POINTER = 4,
  /**
   * A panic or broken internal contract; please report it.
   */
  INVD_STATUS_INTERNAL = 5,
} InvdStatus;

/**
 * Opaque table of exact rational values.
 */
typedef struct InvdFunction InvdFunction;

/**
 * Opaque commuting system.
 */
typedef struct InvdSystem InvdSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a system from `n_transforms` image tables of length `size`, laid
 * out one after another (`images[j * size + x]` is `T_j(x)`, 0-based).
 *
 * # Safety
 * `images` must point to `n_transforms * size` readable values and `out`
 * must be valid for a pointer write.
 */
enum InvdStatus invd_system_new(const size_t *images,
                                size_t n_transforms,
                                size_t size,
                                struct InvdSystem **out);

/**
 * # Safety
 * `system` must come from [`invd_system_new`] and not be used afterwards.
 */
void invd_system_free(struct InvdSystem *system);

/**
 * Domain size of a system, or 0 for a null handle.
 *
 * # Safety
 * `system` must be null or a live handle.
 */
size_t invd_system_size(const struct InvdSystem *system);

/**
 * Builds the function `x ↦ numer[x] / denom[x]`. A null `denom` means all
 * denominators are 1; a zero denominator is an input error.
 *
 * # Safety
 * `numer` (and `denom` unless null) must point to `len` readable values and
 * `out` must be valid for a pointer write.
 */
enum InvdStatus invd_function_new(const int64_t *numer,
                                  const int64_t *denom,
                                  size_t len,
                                  struct InvdFunction **out);

/**
 * # Safety
 * `f` must come from [`invd_function_new`] and not be used afterwards.
 */
void invd_function_free(struct InvdFunction *f);

/**
 * Decomposes `f` over `system`; `bound = 0` selects the default `2N`.
 *
 * # Safety
 * Handles must be live and `json_out` valid for a pointer write.
 */
enum InvdStatus invd_decompose(const struct InvdSystem *system,
                               const struct InvdFunction *f,
                               size_t bound,
                               char **json_out);

/**
 * Checks Condition (*); `bound = 0` selects the default `2N`.
 *
 * # Safety
 * Handles must be live and `json_out` valid for a pointer write.
 */
enum InvdStatus invd_check_star(const struct InvdSystem *system,
                                const struct InvdFunction *f,
                                size_t bound,
                                char **json_out);

/**
 * # Safety
 * Handles must be live and `json_out` valid for a pointer write.
 */
enum InvdStatus invd_oracle(const struct InvdSystem *system,
                            const struct InvdFunction *f,
                            char **json_out);

/**
 * Runs a subcommand (`validate`, `decompose`, `star-check`, `oracle`,
 * `lattice-decompose`, `bounded-transfer`) on an instance document.
 *
 * # Safety
 * `command` and `instance_json` must be NUL-terminated strings and
 * `json_out` valid for a pointer write.
 */
enum InvdStatus invd_run_json(const char *command,
                              const char *instance_json,
                              size_t bound,
                              char **json_out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void invd_string_free(char *s);

/**
 * Static name of a status code.
 */
const char *invd_status_name(enum InvdStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVDECOMP_H */
