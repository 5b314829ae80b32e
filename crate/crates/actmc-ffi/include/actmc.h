#ifndef ACTMC_H
#define ACTMC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible entry point.
 */
typedef enum McStatus {
  McStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  McStatus_NullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  McStatus_InvalidUtf8 = 2,
  /**
   * The program text failed to parse or validate.
   */
  McStatus_ParseError = 3,
  /**
   * An argument value is out of range (unknown benchmark, bad scale...).
   */
  McStatus_InvalidArgument = 4,
  /**
   * An enumeration or exploration budget was exceeded.
   */
  McStatus_BudgetExceeded = 5,
  /**
   * Internal failure; details via mc_last_error.
   */
  McStatus_Internal = 6,
} McStatus;

/**
 * Exploration order policy.
 */
typedef enum McStrategy {
  McStrategy_Dfs = 0,
  McStrategy_UniformDfs = 1,
  McStrategy_RfsStep = 2,
  McStrategy_RfsBranch = 3,
} McStrategy;

/**
 * Final verdict of a verification run.
 */
typedef enum McVerdict {
  McVerdict_AllSafe = 0,
  McVerdict_Deadlock = 1,
  McVerdict_Crash = 2,
  /**
   * A budget tripped before the exploration finished.
   */
  McVerdict_Exhausted = 3,
} McVerdict;

/**
 * A parsed, validated program. Opaque.
 */
typedef struct McProgram McProgram;

/**
 * The result of a verification run. Opaque; read through the accessors.
 */
typedef struct McReport McReport;

/**
 * Verification options. Zero means "unlimited" for every budget field.
 */
typedef struct McOptions {
  enum McStrategy strategy;
  uint64_t seed;
  /**
   * Keep exploring after the first bug.
   */
  bool exhaustive;
  /**
   * Locate the critical transition of the first bug (forces stopping at
   * it).
   */
  bool find_critical_transition;
  /**
   * Exploration-tree garbage collection.
   */
  bool gc;
  uint64_t max_traces;
  uint64_t max_states;
  uint64_t timeout_ms;
} McOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or null when
 * no failure was recorded. The pointer stays valid until the next failing
 * call on the same thread.
 */
const char *mc_last_error(void);

/**
 * ABI revision; bumped on any breaking change to this header.
 */
uint32_t mc_abi_version(void);

/**
 * Parse DSL text into a program handle.
 *
 * # Safety
 * `text` must point to a NUL-terminated string; `out` must be a valid
 * pointer. On success `*out` owns the program and must be released with
 * [`mc_program_free`].
 */
enum McStatus mc_program_parse(const char *text, struct McProgram **out);

/**
 * Instantiate a built-in benchmark: one of "mpi_any", "philosophers_mutex",
 * "philosophers_semaphore", "factorial", "polling_loop", "random".
 *
 * # Safety
 * `name` must point to a NUL-terminated string; `out` must be valid.
 */
enum McStatus mc_program_from_bench(const char *name, uint32_t scale, struct McProgram **out);

/**
 * Render a program handle back to DSL text. Free the string with
 * [`mc_string_free`].
 *
 * # Safety
 * `program` must be a live handle from this library; `out` must be valid.
 */
enum McStatus mc_program_emit(const struct McProgram *program, char **out);

/**
 * Release a program handle. Null is a no-op.
 *
 * # Safety
 * `program` must be null or a live handle from this library.
 */
void mc_program_free(struct McProgram *program);

/**
 * Default options: dfs, seed 0, stop at first bug, gc on, no limits.
 */
struct McOptions mc_options_default(void);

/**
 * Run the checker on a program.
 *
 * # Safety
 * `program` must be a live handle; `options` and `out` must be valid
 * pointers. On success `*out` owns the report and must be released with
 * [`mc_report_free`].
 */
enum McStatus mc_verify(const struct McProgram *program,
                        const struct McOptions *options,
                        struct McReport **out);

/**
 * # Safety
 * `report` must be a live handle from this library.
 */
enum McVerdict mc_report_verdict(const struct McReport *report);

/**
 * # Safety
 * `report` must be a live handle from this library.
 */
uint64_t mc_report_traces_explored(const struct McReport *report);

/**
 * # Safety
 * `report` must be a live handle from this library.
 */
uint64_t mc_report_states_visited(const struct McReport *report);

/**
 * States explored when the first bug completed, or -1 when no bug was
 * found.
 *
 * # Safety
 * `report` must be a live handle from this library.
 */
int64_t mc_report_states_before_first_bug(const struct McReport *report);

/**
 * # Safety
 * `report` must be a live handle from this library.
 */
uint64_t mc_report_ssb_count(const struct McReport *report);

/**
 * # Safety
 * `report` must be a live handle from this library.
 */
uint64_t mc_report_peak_tree_nodes(const struct McReport *report);

/**
 * 1-based index of the critical transition in the counterexample; 0 means
 * the start transition (no correct execution exists); -1 means no
 * critical-transition search ran.
 *
 * # Safety
 * `report` must be a live handle from this library.
 */
int64_t mc_report_ct_index(const struct McReport *report);

/**
 * The replayable counterexample as text, one `index actor action` line per
 * transition; `*out` is null when the run was safe. Free the string with
 * [`mc_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` must be valid.
 */
enum McStatus mc_report_counterexample(const struct McReport *report, char **out);

/**
 * The full machine-readable report document (stats, counterexample,
 * critical transition) as JSON. Free with [`mc_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` must be valid.
 */
enum McStatus mc_report_json(const struct McReport *report, char **out);

/**
 * Release a report handle. Null is a no-op.
 *
 * # Safety
 * `report` must be null or a live handle from this library.
 */
void mc_report_free(struct McReport *report);

/**
 * Count distinct equivalence classes of maximal executions, either with
 * the reduced explorer (dfs, seed 0) or with the brute-force enumeration
 * oracle. `budget` bounds the oracle's interleavings (0 picks a default of
 * two million); exceeding it fails loudly instead of truncating.
 *
 * # Safety
 * `program` must be a live handle; `out` must point to writable storage.
 */
enum McStatus mc_count_traces(const struct McProgram *program,
                              bool use_oracle,
                              uint64_t budget,
                              uint64_t *out);

/**
 * Release a string obtained from this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void mc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACTMC_H */
