#ifndef PAMLAB_H
#define PAMLAB_H

/* Generated by cbindgen. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum PamlabOrbitKind {
  PAMLAB_ORBIT_KIND_HIT = 0,
  PAMLAB_ORBIT_KIND_CYCLE = 1,
  PAMLAB_ORBIT_KIND_CAP_EXCEEDED = 2,
} PamlabOrbitKind;

typedef enum PamlabReachKind {
  PAMLAB_REACH_KIND_REACHED = 0,
  PAMLAB_REACH_KIND_UNREACHABLE_CYCLE = 1,
  PAMLAB_REACH_KIND_UNREACHABLE_WEIGHT = 2,
  PAMLAB_REACH_KIND_UNKNOWN = 3,
} PamlabReachKind;

/**
 * Status codes returned by every fallible call.
 */
typedef enum PamlabStatus {
  PAMLAB_STATUS_OK = 0,
  PAMLAB_STATUS_NULL_POINTER = 1,
  PAMLAB_STATUS_INVALID_UTF8 = 2,
  PAMLAB_STATUS_SYNTAX = 3,
  PAMLAB_STATUS_VALIDATION = 4,
  PAMLAB_STATUS_INVALID_ARGUMENT = 5,
  PAMLAB_STATUS_DOMAIN = 6,
  PAMLAB_STATUS_INTERNAL = 7,
} PamlabStatus;

typedef enum PamlabTdsKind {
  PAMLAB_TDS_KIND_YES = 0,
  PAMLAB_TDS_KIND_NO = 1,
  PAMLAB_TDS_KIND_UNKNOWN = 2,
} PamlabTdsKind;

typedef enum PamlabVariant {
  PAMLAB_VARIANT_GREEDY = 0,
  PAMLAB_VARIANT_LAZY = 1,
} PamlabVariant;

/**
 * Opaque handle to a validated map.
 */
typedef struct PamlabMap PamlabMap;

typedef struct PamlabReachResult {
  enum PamlabReachKind kind;
  /**
   * Step at which the target was hit. Meaningful only for `Reached`.
   */
  size_t step;
} PamlabReachResult;

typedef struct PamlabOrbitResult {
  enum PamlabOrbitKind kind;
  size_t preperiod;
  size_t period;
  /**
   * Number of orbit points computed, including the starting point.
   */
  size_t points;
} PamlabOrbitResult;

typedef struct PamlabTdsResult {
  enum PamlabTdsKind kind;
  /**
   * For `No`: the step where a digit outside {0, 1} appeared.
   */
  size_t step;
  /**
   * For `No`: the offending digit.
   */
  uint64_t digit;
} PamlabTdsResult;

/**
 * Parses and validates a JSON map document. On success `*out` owns a new
 * handle that must be released with [`pamlab_map_free`].
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PamlabStatus pamlab_map_from_json(const char *json, struct PamlabMap **out);

/**
 * Releases a map handle. Passing null is a no-op.
 *
 * # Safety
 * `map` must come from [`pamlab_map_from_json`] and not be freed twice.
 */
void pamlab_map_free(struct PamlabMap *map);

/**
 * Number of pieces in the map, or 0 for a null handle.
 *
 * # Safety
 * `map` must be null or a live handle.
 */
size_t pamlab_map_piece_count(const struct PamlabMap *map);

/**
 * Evaluates the map at `x`. On success `*out` holds the image as a string.
 *
 * # Safety
 * Pointers must be valid; `x` NUL-terminated.
 */
enum PamlabStatus pamlab_map_eval(const struct PamlabMap *map, const char *x, char **out);

/**
 * Decides whether `y` lies on the orbit of `x`, choosing the strongest
 * applicable decider. `cap` bounds the number of simulated steps.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum PamlabStatus pamlab_reach(const struct PamlabMap *map,
                               const char *x,
                               const char *y,
                               size_t cap,
                               struct PamlabReachResult *out);

/**
 * Iterates the map from `x0` for at most `cap` steps and reports how the
 * orbit ended.
 *
 * # Safety
 * Pointers must be valid; `x0` NUL-terminated.
 */
enum PamlabStatus pamlab_orbit(const struct PamlabMap *map,
                               const char *x0,
                               size_t cap,
                               struct PamlabOrbitResult *out);

/**
 * Writes the first `len` digits of the beta-expansion of `x` into `digits`.
 *
 * # Safety
 * `digits` must point to at least `len` writable `u64` values.
 */
enum PamlabStatus pamlab_beta_digits(const char *beta,
                                     enum PamlabVariant variant,
                                     const char *x,
                                     uint64_t *digits,
                                     size_t len);

/**
 * Decides whether `x` has an expansion in base `beta` using only digits 0
 * and 1, following the greedy orbit for at most `depth` steps.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum PamlabStatus pamlab_tds(const char *beta,
                             const char *x,
                             size_t depth,
                             struct PamlabTdsResult *out);

/**
 * Scans `n = 0..=n_max` with the truncation index `index` and stores the
 * number of rows satisfying the bound in `*passed`.
 *
 * # Safety
 * `passed` must be a writable pointer.
 */
enum PamlabStatus pamlab_theorem5_check(uint64_t n_max, uint32_t index, uint64_t *passed);

/**
 * Copy of the last error message on this thread, or null if the last call
 * succeeded. Release with [`pamlab_string_free`].
 */
char *pamlab_last_error_message(void);

/**
 * Releases a string returned by this library. Passing null is a no-op.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void pamlab_string_free(char *s);

#endif /* PAMLAB_H */
