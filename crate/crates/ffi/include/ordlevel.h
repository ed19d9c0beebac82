#ifndef ORDLEVEL_H
#define ORDLEVEL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Barcode plus the universe it was computed over (for labels).
typedef struct OrdBarcode OrdBarcode;

// Ranked sequence on a linear or circular domain.
typedef struct OrdSequence OrdSequence;

// Sequence with an incrementally maintained box snake.
typedef struct OrdSnake OrdSnake;

// Result code of every fallible call.
typedef uint32_t OrdStatus;

typedef uint32_t OrdDomain;

typedef uint32_t OrdRule;

typedef uint32_t OrdDirection;

// One bar in rank space.
typedef struct OrdBar {
  uint32_t birth;
  uint32_t death;
  size_t birth_index;
  size_t death_index;
  bool essential;
} OrdBar;

// Side on which samples are dropped by a shift; new samples enter on the
// other side.
typedef uint32_t OrdSide;

#define ORD_OK 0

// A required pointer argument was null.
#define ORD_ERR_NULL 1

// Malformed input: empty or unordered values, ranks outside the universe,
// unknown enumeration value.
#define ORD_ERR_INPUT 2

// Index past the end of a barcode, or labels requested where none exist.
#define ORD_ERR_RANGE 3

// A surgery precondition failed, e.g. a shift longer than the window.
#define ORD_ERR_SURGERY 4

// Internal failure; the handle involved must not be used again except to
// free it.
#define ORD_ERR_INTERNAL 5

#define ORD_DOMAIN_LINEAR 0

#define ORD_DOMAIN_CIRCULAR 1

#define ORD_RULE_ELDER 0

#define ORD_RULE_LOCAL 1

#define ORD_DIRECTION_SUB 0

#define ORD_DIRECTION_SUPER 1

#define ORD_SIDE_LEFT 0

#define ORD_SIDE_RIGHT 1

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static, NUL-terminated description of a status code.
const char *ord_status_message(OrdStatus status);

// Library version, NUL-terminated.
const char *ord_version(void);

// Quantizes `len` raw values onto dense ranks; NaN is rejected.
//
// # Safety
// `values` must point to `len` readable doubles; `out` must be writable.
OrdStatus ord_sequence_from_values(const double *values,
                                   size_t len,
                                   OrdDomain dom,
                                   struct OrdSequence **out);

// Sequence of ranks, each below `universe_size`.
//
// # Safety
// `ranks` must point to `len` readable integers; `out` must be writable.
OrdStatus ord_sequence_from_ranks(const uint32_t *ranks,
                                  size_t len,
                                  uint32_t universe_size,
                                  OrdDomain dom,
                                  struct OrdSequence **out);

// Number of samples; 0 for a null handle.
//
// # Safety
// `seq` must be null or a live handle.
size_t ord_sequence_len(const struct OrdSequence *seq);

// Copies up to `cap` ranks into `out` and returns the sequence length.
//
// # Safety
// `seq` must be null or a live handle; `out` must have room for `cap` ranks.
size_t ord_sequence_ranks(const struct OrdSequence *seq, uint32_t *out, size_t cap);

// # Safety
// `seq` must be null or a handle not yet freed.
void ord_sequence_free(struct OrdSequence *seq);

// # Safety
// `seq` must be a live handle; `out` must be writable.
OrdStatus ord_barcode_compute(const struct OrdSequence *seq,
                              OrdRule r,
                              OrdDirection dir,
                              struct OrdBarcode **out);

// Number of bars; 0 for a null handle.
//
// # Safety
// `bc` must be null or a live handle.
size_t ord_barcode_len(const struct OrdBarcode *bc);

// Bars are ordered by birth index.
//
// # Safety
// `bc` must be a live handle; `out` must be writable.
OrdStatus ord_barcode_get(const struct OrdBarcode *bc, size_t index, struct OrdBar *out);

// Original values at a bar's endpoints; `ORD_ERR_RANGE` for rank inputs.
//
// # Safety
// `bc` must be a live handle; `birth` and `death` must be writable.
OrdStatus ord_barcode_labels(const struct OrdBarcode *bc,
                             size_t index,
                             double *birth,
                             double *death);

// Barcode as the JSON document printed by the command-line tool. Release the
// string with [`ord_string_free`].
//
// # Safety
// `bc` must be a live handle; `out` must be writable.
OrdStatus ord_barcode_to_json(const struct OrdBarcode *bc, char **out);

// # Safety
// `bc` must be null or a handle not yet freed.
void ord_barcode_free(struct OrdBarcode *bc);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void ord_string_free(char *s);

// Builds the box snake of a copy of `seq`.
//
// # Safety
// `seq` must be a live handle; `out` must be writable.
OrdStatus ord_snake_new(const struct OrdSequence *seq, struct OrdSnake **out);

// Slides the window by `len` samples: drops `len` samples on `side` and
// appends `ranks` on the other side, updating the box snake by cut and glue.
// Ranks must lie in the sequence's universe.
//
// # Safety
// `snake` must be a live handle; `ranks` must point to `len` integers.
OrdStatus ord_snake_shift(struct OrdSnake *snake, OrdSide side, const uint32_t *ranks, size_t len);

// Box and extremum-box counts; either out pointer may be null.
//
// # Safety
// `snake` must be a live handle.
OrdStatus ord_snake_box_counts(const struct OrdSnake *snake, size_t *boxes, size_t *extrema);

// Barcode computed from the extremum boxes.
//
// # Safety
// `snake` must be a live handle; `out` must be writable.
OrdStatus ord_snake_barcode(const struct OrdSnake *snake,
                            OrdRule r,
                            OrdDirection dir,
                            struct OrdBarcode **out);

// Copy of the current window.
//
// # Safety
// `snake` must be a live handle; `out` must be writable.
OrdStatus ord_snake_sequence(const struct OrdSnake *snake, struct OrdSequence **out);

// # Safety
// `snake` must be null or a handle not yet freed.
void ord_snake_free(struct OrdSnake *snake);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORDLEVEL_H */
