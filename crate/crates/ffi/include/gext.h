#ifndef GEXT_H
#define GEXT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum GextStatus {
  GEXT_STATUS_OK = 0,
  /**
   * The call succeeded but a check in the report failed.
   */
  GEXT_STATUS_CHECK_FAILED = 1,
  GEXT_STATUS_NULL_POINTER = 2,
  GEXT_STATUS_INVALID_UTF8 = 3,
  GEXT_STATUS_PARSE = 4,
  GEXT_STATUS_INVALID_GROUPOID = 5,
  GEXT_STATUS_INVALID_ARGUMENT = 6,
  GEXT_STATUS_PRECONDITION = 7,
  GEXT_STATUS_ISOTROPY_OBSTRUCTION = 8,
  GEXT_STATUS_NOT_ROOT_OF_UNITY = 9,
  GEXT_STATUS_WINDOW_TOO_SMALL = 10,
  GEXT_STATUS_HYPOTHESES_NOT_MET = 11,
  GEXT_STATUS_BUFFER_TOO_SMALL = 12,
  GEXT_STATUS_INTERNAL = 13,
  GEXT_STATUS_PANIC = 14,
} GextStatus;

/**
 * A parsed document.
 */
typedef struct GextDocument GextDocument;

/**
 * The outcome of a command.
 */
typedef struct GextReport GextReport;

/**
 * Run parameters. Fields flagged off by their `has_` member, and `k == 0`,
 * fall back to the document's parameters.
 */
typedef struct GextOptions {
  uint64_t seed;
  uint64_t samples;
  uint32_t k;
  bool has_power;
  int64_t power;
  bool has_modes;
  int64_t modes_start;
  int64_t modes_end;
} GextOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the last failure on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *gext_last_error(void);

/**
 * Default options: seed 0, 100 samples, everything else from the document.
 */
struct GextOptions gext_options_default(void);

/**
 * Parses a JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum GextStatus gext_document_parse(const char *json, struct GextDocument **out);

/**
 * Loads a bundled fixture by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum GextStatus gext_document_fixture(const char *name, struct GextDocument **out);

/**
 * # Safety
 * `doc` must be null or a handle from this library, not yet freed.
 */
void gext_document_free(struct GextDocument *doc);

/**
 * Unit and arrow counts of the document's groupoid.
 *
 * # Safety
 * `doc` must be a live handle; `units` and `arrows` writable pointers.
 */
enum GextStatus gext_document_size(const struct GextDocument *doc, size_t *units, size_t *arrows);

/**
 * Runs a command by its command-line name (`validate`, `normalize`,
 * `trivialize`, `algebra`, `decompose`, `cyclic-oracle`, `morita`,
 * `verify-all`). Returns `Ok` or `CheckFailed` with `*out` set, or an
 * error status with `*out` untouched.
 *
 * # Safety
 * `doc` must be a live handle, `command` a NUL-terminated string, `options`
 * null or readable, and `out` writable.
 */
enum GextStatus gext_run(const struct GextDocument *doc,
                         const char *command,
                         const struct GextOptions *options,
                         struct GextReport **out);

/**
 * Runs every check on all bundled fixtures and on random instances.
 *
 * # Safety
 * `options` must be null or readable, and `out` writable.
 */
enum GextStatus gext_verify_fixtures(const struct GextOptions *options, struct GextReport **out);

/**
 * # Safety
 * `report` must be null or a handle from this library, not yet freed.
 */
void gext_report_free(struct GextReport *report);

/**
 * Whether every check passed, and how many checks there are.
 *
 * # Safety
 * `report` must be a live handle; `passed` and `checks` writable.
 */
enum GextStatus gext_report_summary(const struct GextReport *report, bool *passed, size_t *checks);

/**
 * The machine-readable report as a new string; free it with
 * [`gext_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum GextStatus gext_report_json(const struct GextReport *report, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void gext_string_free(char *s);

/**
 * Reduced norm of an element of `C(G, w^power)`, given as `2 * arrows`
 * interleaved real and imaginary parts in arrow order.
 *
 * # Safety
 * `doc` must be a live handle, `coeffs` readable for `len` doubles, and
 * `norm` writable.
 */
enum GextStatus gext_reduced_norm(const struct GextDocument *doc,
                                  int64_t power,
                                  const double *coeffs,
                                  size_t len,
                                  double *norm);

/**
 * Summand and center dimensions of the finite cyclic extension of order
 * `k`, one pair per mode `0..k`. Writes `k` to `*count`; returns
 * `BufferTooSmall` if `capacity < k`.
 *
 * # Safety
 * `doc` must be a live handle, `dims` and `centers` writable for
 * `capacity` entries, and `count` writable.
 */
enum GextStatus gext_cyclic_summands(const struct GextDocument *doc,
                                     uint32_t k,
                                     size_t *dims,
                                     size_t *centers,
                                     size_t capacity,
                                     size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEXT_H */
