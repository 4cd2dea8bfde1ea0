#ifndef GRIDFLEX_H
#define GRIDFLEX_H

/* Generated by cbindgen from the gridflex-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every API call.
 */
typedef enum GfStatus {
  GF_STATUS_GF_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GF_STATUS_GF_NULL_POINTER = 1,
  /**
   * An argument or configuration value is invalid.
   */
  GF_STATUS_GF_INVALID_ARGUMENT = 2,
  /**
   * File system failure.
   */
  GF_STATUS_GF_IO = 3,
  /**
   * A file exists but does not parse.
   */
  GF_STATUS_GF_FORMAT = 4,
  /**
   * The problem is well-formed but has no solution.
   */
  GF_STATUS_GF_INFEASIBLE = 5,
  /**
   * A numeric routine failed to converge.
   */
  GF_STATUS_GF_NUMERIC = 6,
  /**
   * Unexpected internal failure.
   */
  GF_STATUS_GF_INTERNAL = 7,
} GfStatus;

/**
 * Opaque wind forecast-error chain handle.
 */
typedef struct GfDtmc GfDtmc;

/**
 * Opaque grid definition handle.
 */
typedef struct GfGrid GfGrid;

/**
 * Opaque runnable scenario handle.
 */
typedef struct GfScenario GfScenario;

/**
 * Aggregate outcome of a batch of seeded runs.
 */
typedef struct GfCampaignSummary {
  uintptr_t n_runs;
  uintptr_t n_failed;
  double failure_rate;
  /**
   * 1 when at least one run succeeded and the J statistics below are
   * meaningful, 0 otherwise.
   */
  uint8_t has_aggregate;
  /**
   * Mean deviation integral over the non-failed runs (Hz*h).
   */
  double mean_j_hz_h;
  /**
   * Two-sided 95% confidence half-width of the mean.
   */
  double ci95_half_width;
  /**
   * Mean per-iteration solve time (s).
   */
  double mean_solve_time_s;
} GfCampaignSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on the calling thread. Never null;
 * empty before the first failure. Valid until the next failing call on
 * this thread.
 */
const char *gf_last_error_message(void);

/**
 * Loads a built-in grid by name: "one_node", "three_node", or
 * "three_node_two_batteries".
 *
 * # Safety
 * `name` must be a valid nul-terminated string; `out` a valid pointer.
 */
enum GfStatus gf_grid_preset(const char *name, struct GfGrid **out);

/**
 * Loads and validates a grid definition from a JSON file.
 *
 * # Safety
 * `path` must be a valid nul-terminated string; `out` a valid pointer.
 */
enum GfStatus gf_grid_from_json_file(const char *path, struct GfGrid **out);

/**
 * Writes the node, generator, wind-farm, and battery counts of a grid.
 *
 * # Safety
 * `grid` must be a live handle; the out pointers must be valid or null
 * (null outputs are skipped).
 */
enum GfStatus gf_grid_counts(const struct GfGrid *grid,
                             uintptr_t *n_nodes,
                             uintptr_t *n_generators,
                             uintptr_t *n_farms,
                             uintptr_t *n_batteries);

/**
 * Releases a grid handle. Null is a no-op.
 *
 * # Safety
 * `grid` must have come from this library and not been freed before.
 */
void gf_grid_free(struct GfGrid *grid);

/**
 * Loads and validates a wind-error chain from a JSON file.
 *
 * # Safety
 * `path` must be a valid nul-terminated string; `out` a valid pointer.
 */
enum GfStatus gf_dtmc_from_json_file(const char *path, struct GfDtmc **out);

/**
 * Estimates a wind-error chain from a history CSV
 * (timestamp,forecast_mw,actual_mw) with `bins` uniform error bins.
 *
 * # Safety
 * `path` must be a valid nul-terminated string; `out` a valid pointer.
 */
enum GfStatus gf_dtmc_estimate_csv(const char *path, uintptr_t bins, struct GfDtmc **out);

/**
 * Writes the number of chain states.
 *
 * # Safety
 * `dtmc` must be a live handle; `out` a valid pointer.
 */
enum GfStatus gf_dtmc_n_states(const struct GfDtmc *dtmc, uintptr_t *out);

/**
 * Writes the mean self-transition probability of the chain.
 *
 * # Safety
 * `dtmc` must be a live handle; `out` a valid pointer.
 */
enum GfStatus gf_dtmc_diagonal_dominance(const struct GfDtmc *dtmc, double *out);

/**
 * Saves the chain as JSON.
 *
 * # Safety
 * `dtmc` must be a live handle; `path` a valid nul-terminated string.
 */
enum GfStatus gf_dtmc_save_json(const struct GfDtmc *dtmc, const char *path);

/**
 * Releases a chain handle. Null is a no-op.
 *
 * # Safety
 * `dtmc` must have come from this library and not been freed before.
 */
void gf_dtmc_free(struct GfDtmc *dtmc);

/**
 * Loads a scenario config JSON and resolves it into a runnable scenario.
 * Relative paths inside the config resolve against its directory.
 *
 * # Safety
 * `config_path` must be a valid nul-terminated string; `out` a valid
 * pointer.
 */
enum GfStatus gf_scenario_load(const char *config_path, struct GfScenario **out);

/**
 * Releases a scenario handle. Null is a no-op.
 *
 * # Safety
 * `scenario` must have come from this library and not been freed before.
 */
void gf_scenario_free(struct GfScenario *scenario);

/**
 * Runs one seeded closed-loop trajectory. `out_failed` receives 1 when
 * the run hit a constraint violation or ran out of feasible actions, and
 * `out_j_hz_h` the deviation integral of the completed part.
 *
 * # Safety
 * `scenario` must be a live handle; out pointers must be valid or null.
 */
enum GfStatus gf_run_once(const struct GfScenario *scenario,
                          uint64_t seed,
                          double *out_j_hz_h,
                          uint8_t *out_failed);

/**
 * Runs `n_runs` trajectories with seeds `base_seed .. base_seed +
 * n_runs` and writes the aggregate summary.
 *
 * # Safety
 * `scenario` must be a live handle; `out` a valid pointer.
 */
enum GfStatus gf_run_campaign(const struct GfScenario *scenario,
                              uint64_t base_seed,
                              uintptr_t n_runs,
                              struct GfCampaignSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRIDFLEX_H */
