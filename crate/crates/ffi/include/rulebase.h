#ifndef RULEBASE_H
#define RULEBASE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum RbCode {
  RB_CODE_OK = 0,
  RB_CODE_NULL_POINTER = 1,
  RB_CODE_INVALID_UTF8 = 2,
  RB_CODE_SYNTAX = 3,
  RB_CODE_NON_GROUND = 4,
  /**
   * The theory derives a literal and its negation.
   */
  RB_CODE_INCONSISTENT = 5,
  /**
   * The theory has a negative dependency cycle.
   */
  RB_CODE_UNSTRATIFIED = 6,
  RB_CODE_UNKNOWN_CORPUS = 7,
  RB_CODE_GENERATE_FAILED = 8,
  RB_CODE_INVALID_ARGUMENT = 9,
  RB_CODE_INTERNAL = 99,
} RbCode;

/**
 * Outcome of forward chaining.
 */
typedef enum RbStatus {
  RB_STATUS_CONSISTENT = 0,
  RB_STATUS_INCONSISTENT = 1,
  RB_STATUS_UNSTRATIFIED = 2,
} RbStatus;

/**
 * A forward-chained model with proofs recorded.
 */
typedef struct RbModel RbModel;

/**
 * A parsed theory.
 */
typedef struct RbTheory RbTheory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *rb_last_error(void);

/**
 * Library version as a static string.
 */
const char *rb_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void rb_string_free(char *s);

/**
 * Parses statement text into a new theory handle.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum RbCode rb_theory_parse(const char *text, struct RbTheory **out);

/**
 * # Safety
 * `t` must come from [`rb_theory_parse`] or be null.
 */
void rb_theory_free(struct RbTheory *t);

/**
 * Number of sentences, or 0 for a null handle.
 *
 * # Safety
 * `t` must be a live theory handle or null.
 */
size_t rb_theory_sentence_count(const struct RbTheory *t);

/**
 * Writes the theory back as statement text, one statement per line.
 *
 * # Safety
 * `t` must be a live theory handle; `out` must be writable.
 */
enum RbCode rb_theory_emit(const struct RbTheory *t, char **out);

/**
 * Forward-chains a theory. The theory handle stays owned by the caller.
 *
 * # Safety
 * `t` must be a live theory handle; `out` must be writable.
 */
enum RbCode rb_model_new(const struct RbTheory *t, struct RbModel **out);

/**
 * # Safety
 * `m` must come from [`rb_model_new`] or be null.
 */
void rb_model_free(struct RbModel *m);

/**
 * # Safety
 * `m` must be a live model handle; `out` must be writable.
 */
enum RbCode rb_model_status(const struct RbModel *m, enum RbStatus *out);

/**
 * Closed-world answer and depth for one ground statement such as
 * `("Bob" "is" "green" "+")`. The depth is the proof depth of the literal
 * the answer rests on, or the failure depth when nothing is derived.
 *
 * # Safety
 * `m` must be a live model handle; `statement` a nul-terminated string;
 * `answer` and `depth` writable.
 */
enum RbCode rb_model_answer(const struct RbModel *m,
                            const char *statement,
                            bool *answer,
                            uint32_t *depth);

/**
 * Full explanation as JSON: answer, depth, proofs, critical sentence
 * indices and a model summary.
 *
 * # Safety
 * `m` must be a live model handle; `statement` a nul-terminated string;
 * `out` writable.
 */
enum RbCode rb_model_explain_json(const struct RbModel *m, const char *statement, char **out);

/**
 * A bundled corpus with its English wording and known answers, as JSON.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out` writable.
 */
enum RbCode rb_corpus_json(const char *name, char **out);

/**
 * Samples one theory reaching `depth` and returns its statement text.
 * `theory_type` is 1 for attribute-only theories and 2 for relational ones.
 *
 * # Safety
 * `out` must be writable.
 */
enum RbCode rb_generate_theory(uint32_t theory_type,
                               bool negation,
                               uint32_t depth,
                               uint64_t seed,
                               size_t max_attempts,
                               char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RULEBASE_H */
