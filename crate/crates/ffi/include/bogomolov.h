#ifndef BOGOMOLOV_H
#define BOGOMOLOV_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum BgStatus {
  BG_STATUS_OK = 0,
  BG_STATUS_NULL_ARGUMENT = 1,
  BG_STATUS_INVALID_UTF8 = 2,
  BG_STATUS_PARSE = 3,
  BG_STATUS_INVALID_PRIME = 4,
  BG_STATUS_UNKNOWN_ENTRY = 5,
  BG_STATUS_INVALID_PRESENTATION = 6,
  BG_STATUS_INCONSISTENT = 7,
  BG_STATUS_BUDGET = 8,
  BG_STATUS_OVERFLOW = 9,
  BG_STATUS_FREE_RANK_MISMATCH = 10,
  BG_STATUS_BUFFER_TOO_SMALL = 11,
  BG_STATUS_INTERNAL = 12,
} BgStatus;

/**
 * Commuting-pair enumeration strategy.
 */
typedef enum BgStrategy {
  BG_STRATEGY_CENTER_REDUCED = 0,
  BG_STRATEGY_FULL = 1,
} BgStrategy;

/**
 * Tail attachment mode.
 */
typedef enum BgTailMode {
  BG_TAIL_MODE_REDUCED = 0,
  BG_TAIL_MODE_FULL = 1,
} BgTailMode;

/**
 * A validated presentation.
 */
typedef struct BgPresentation BgPresentation;

/**
 * The outcome of a Bogomolov multiplier computation.
 */
typedef struct BgReport BgReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *bg_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *bg_status_name(enum BgStatus status);

/**
 * Parses presentation text. A `prime` of 0 uses the prime fixed in the text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BgStatus bg_presentation_parse(const char *text, uint64_t prime, struct BgPresentation **out);

/**
 * Loads a catalog entry, with default parameter values.
 *
 * # Safety
 * `id` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BgStatus bg_presentation_from_catalog(const char *id,
                                           uint64_t prime,
                                           struct BgPresentation **out);

/**
 * Number of generators, or 0 for a null handle.
 *
 * # Safety
 * `pres` must be null or a live handle.
 */
size_t bg_presentation_generator_count(const struct BgPresentation *pres);

/**
 * Prime of the presentation, or 0 for a null handle.
 *
 * # Safety
 * `pres` must be null or a live handle.
 */
uint32_t bg_presentation_prime(const struct BgPresentation *pres);

/**
 * # Safety
 * `pres` must be null or a handle not yet freed.
 */
void bg_presentation_free(struct BgPresentation *pres);

/**
 * Computes the Bogomolov multiplier.
 *
 * # Safety
 * `pres` must be a live handle and `out` a valid pointer.
 */
enum BgStatus bg_bogomolov(const struct BgPresentation *pres,
                           enum BgTailMode mode,
                           enum BgStrategy strategy,
                           struct BgReport **out);

/**
 * Number of torsion invariants; 0 means trivial.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t bg_report_invariant_count(const struct BgReport *report);

/**
 * Invariant `index`, or 0 when out of range.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
uint64_t bg_report_invariant(const struct BgReport *report, size_t index);

/**
 * Free rank of the tail quotient.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t bg_report_free_rank(const struct BgReport *report);

/**
 * JSON form of the report, owned by the handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
const char *bg_report_json(const struct BgReport *report);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void bg_report_free(struct BgReport *report);

/**
 * Schur multiplier invariants written to `buf`; `len` receives the count.
 * Returns `BufferTooSmall` with `len` set when `cap` is insufficient.
 *
 * # Safety
 * `pres` must be a live handle, `len` valid, and `buf` valid for `cap`
 * writes (it may be null when `cap` is 0).
 */
enum BgStatus bg_schur(const struct BgPresentation *pres, uint64_t *buf, size_t cap, size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOGOMOLOV_H */
