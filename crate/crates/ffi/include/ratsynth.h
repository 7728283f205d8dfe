#ifndef RATSYNTH_H
#define RATSYNTH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RsStatus {
  RS_STATUS_OK = 0,
  RS_STATUS_NULL_ARGUMENT = 1,
  RS_STATUS_INVALID_UTF8 = 2,
  RS_STATUS_PARSE_ERROR = 3,
  RS_STATUS_SYNTH_ERROR = 4,
  RS_STATUS_RUNTIME_ERROR = 5,
  // The program returned no output for this input.
  RS_STATUS_BOT = 6,
  RS_STATUS_PANIC = 7,
} RsStatus;

typedef struct RsProblem RsProblem;

typedef struct RsProgram RsProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call on the same thread.
const char *rs_last_error(void);

// Parses an SMT-LIB problem; `inputs` and `outputs` are comma-separated names.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be writable.
enum RsStatus rs_problem_parse(const char *smt2,
                               const char *inputs,
                               const char *outputs,
                               struct RsProblem **out);

// # Safety
// `p` must be null or a handle from [`rs_problem_parse`], freed once.
void rs_problem_free(struct RsProblem *p);

// Synthesizes a program with `iteration_budget` loop iterations (0 keeps the
// default). `complete` receives 1 when the program is complete.
//
// # Safety
// `problem` must be a live handle; `out` must be writable; `complete` may be null.
enum RsStatus rs_synthesize(const struct RsProblem *problem,
                            uint32_t iteration_budget,
                            struct RsProgram **out,
                            int32_t *complete);

// # Safety
// `json` must be NUL-terminated; `out` must be writable.
enum RsStatus rs_program_from_json(const char *json, struct RsProgram **out);

// Serialized program; release with [`rs_string_free`].
//
// # Safety
// `prog` must be a live handle; `out` must be writable.
enum RsStatus rs_program_to_json(const struct RsProgram *prog, char **out);

// Runs the program on an input such as `"x=1/2"`. On `Ok`, `out` receives
// the outputs as `name=value` lines; on `Bot` it is left untouched.
//
// # Safety
// `prog` must be a live handle; `input` NUL-terminated; `out` writable.
enum RsStatus rs_program_run(const struct RsProgram *prog, const char *input, char **out);

// # Safety
// `p` must be null or a handle from this library, freed once.
void rs_program_free(struct RsProgram *p);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void rs_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RATSYNTH_H */
