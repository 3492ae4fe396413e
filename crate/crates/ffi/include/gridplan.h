#ifndef GRIDPLAN_H
#define GRIDPLAN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GpDayType {
  GP_DAY_TYPE_WEEKDAY = 0,
  GP_DAY_TYPE_WEEKEND = 1,
} GpDayType;

typedef enum GpSolveStatus {
  GP_SOLVE_STATUS_OPTIMAL = 0,
  GP_SOLVE_STATUS_INFEASIBLE = 1,
  GP_SOLVE_STATUS_UNBOUNDED = 2,
  // Node, iteration or time limit reached.
  GP_SOLVE_STATUS_LIMIT = 3,
  GP_SOLVE_STATUS_NUMERICAL_FAILURE = 4,
} GpSolveStatus;

typedef enum GpStatus {
  GP_STATUS_OK = 0,
  GP_STATUS_NULL_POINTER = 1,
  // Bad argument, configuration or input data.
  GP_STATUS_INVALID_ARGUMENT = 2,
  // No feasible solution, or the solver failed.
  GP_STATUS_INFEASIBLE = 3,
  // Input series do not cover the study horizon.
  GP_STATUS_COVERAGE = 4,
  GP_STATUS_IO = 5,
  // A bug: the library panicked. The handle involved should be freed.
  GP_STATUS_PANIC = 6,
} GpStatus;

typedef enum GpVariant {
  // Time-varying ratings and renewable availability.
  GP_VARIANT_CI = 0,
  GP_VARIANT_TRADITIONAL = 1,
  // Both, compared; the first is the plan later stages use.
  GP_VARIANT_BOTH = 2,
} GpVariant;

typedef struct GpGrid GpGrid;

typedef struct GpProblem GpProblem;

typedef struct GpStudy GpStudy;

// One bus-interval value of a typical day: shed or demanded MW.
typedef struct GpBusValue {
  size_t epoch;
  size_t quarter;
  enum GpDayType day;
  // Position of the bus in the grid's bus list.
  size_t bus;
  size_t interval;
  double mw;
} GpBusValue;

typedef struct GpReliability {
  // Unserved energy, MWh per year.
  double eue_mwh;
  double lolp;
  // Outage hours per bus per year.
  double lole_hours_per_bus;
} GpReliability;

// Costs of a solved expansion plan, $.
typedef struct GpPlanCosts {
  double transmission_investment;
  double generation;
  size_t built_lines;
} GpPlanCosts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *gp_version(void);

// Message of the last failure on this thread, or null. Valid until the
// next call into the library from this thread.
const char *gp_last_error(void);

// Log-law wind speed at `h_hub` from a reading `v_ref` at `h_ref`.
//
// # Safety
// `result` must be valid for writes.
enum GpStatus gp_extrapolate_wind_speed(double v_ref,
                                        double h_ref,
                                        double h_hub,
                                        double z0,
                                        double *result);

// # Safety
// `result` must be valid for writes.
enum GpStatus gp_wind_power(double v_hub,
                            double cut_in,
                            double rated,
                            double cut_out,
                            double capacity_mw,
                            double *result);

// # Safety
// `result` must be valid for writes.
enum GpStatus gp_solar_power(double shortwave,
                             double longwave,
                             double capacity_mw,
                             double f_sw,
                             double f_lw,
                             double g_ref,
                             double *result);

// Dynamic rating with the default coefficients.
//
// # Safety
// `result` must be valid for writes.
enum GpStatus gp_dynamic_rating(double base_rating_mva,
                                double temperature_c,
                                double wind_speed_mps,
                                double solar_wm2,
                                double *result);

// # Safety
// `file` must be a nul-terminated string; `grid` must be valid for writes.
enum GpStatus gp_grid_load(const char *file, struct GpGrid **grid);

// # Safety
// `json` must be a nul-terminated string; `grid` must be valid for writes.
enum GpStatus gp_grid_parse(const char *json, struct GpGrid **grid);

// # Safety
// `grid` must be null or a handle from this library, not yet freed.
void gp_grid_free(struct GpGrid *grid);

// Bus, line (including candidates) and candidate-line counts. Any output
// pointer may be null.
//
// # Safety
// `grid` must be a live handle; non-null outputs must be valid for writes.
enum GpStatus gp_grid_counts(const struct GpGrid *grid,
                             size_t *buses,
                             size_t *lines,
                             size_t *candidates);

// Construction plus maintenance cost, $, of building `line_ids[i]` in
// `epochs[i]` for each of the `n` entries.
//
// # Safety
// `grid` must be a live handle; `line_ids` and `epochs` must hold `n`
// entries; `result` must be valid for writes.
enum GpStatus gp_grid_capital_cost(const struct GpGrid *grid,
                                   const char *const *line_ids,
                                   const size_t *epochs,
                                   size_t n,
                                   double *result);

// Reliability indices of one epoch from shed values and the demand they
// were cut from. Demand entries absent from `demand` count as zero.
//
// # Safety
// `grid` must be a live handle; `shed` and `demand` must hold `n_shed` and
// `n_demand` entries; `result` must be valid for writes.
enum GpStatus gp_reliability(const struct GpGrid *grid,
                             const struct GpBusValue *shed,
                             size_t n_shed,
                             const struct GpBusValue *demand,
                             size_t n_demand,
                             size_t epoch,
                             struct GpReliability *result);

// # Safety
// `file` must be a nul-terminated string; `problem` must be valid for writes.
enum GpStatus gp_problem_read_mps(const char *file, struct GpProblem **problem);

// # Safety
// `text` must be a nul-terminated string; `problem` must be valid for writes.
enum GpStatus gp_problem_parse_mps(const char *text, struct GpProblem **problem);

// # Safety
// `problem` must be a live handle; `file` a nul-terminated string.
enum GpStatus gp_problem_write_mps(const struct GpProblem *problem, const char *file);

// # Safety
// `problem` must be null or a handle from this library, not yet freed.
void gp_problem_free(struct GpProblem *problem);

// # Safety
// `problem` must be a live handle; non-null outputs must be valid for writes.
enum GpStatus gp_problem_size(const struct GpProblem *problem,
                              size_t *variables,
                              size_t *constraints);

// Solve with the embedded branch and bound. Returns `GP_STATUS_OK` whenever
// the solver ran; `status` says how it ended and `objective` is NaN when no
// feasible point is known. `relative_gap` of zero or less keeps the default.
//
// # Safety
// `problem` must be a live handle; `status` and `objective` must be valid
// for writes.
enum GpStatus gp_problem_solve(const struct GpProblem *problem,
                               double relative_gap,
                               enum GpSolveStatus *status,
                               double *objective);

// Open a study file. `output_dir` may be null to keep the configured one.
//
// # Safety
// `config` must be a nul-terminated string, `output_dir` null or one;
// `study` must be valid for writes.
enum GpStatus gp_study_open(const char *config, const char *output_dir, struct GpStudy **study);

// # Safety
// `study` must be null or a handle from this library, not yet freed.
void gp_study_free(struct GpStudy *study);

// Build and write the representative profiles.
//
// # Safety
// `study` must be a live handle.
enum GpStatus gp_study_synth(const struct GpStudy *study);

// Solve and write the expansion plan for the configured fleet. `costs`
// may be null; otherwise it receives the first variant's costs.
//
// # Safety
// `study` must be a live handle; `costs` null or valid for writes.
enum GpStatus gp_study_plan(const struct GpStudy *study,
                            enum GpVariant variant,
                            struct GpPlanCosts *costs);

// Commitment on every typical day of every configured case.
//
// # Safety
// `study` must be a live handle.
enum GpStatus gp_study_simulate(const struct GpStudy *study);

// Reliability reports for every configured case from the simulation files.
// `result`, if not null, receives the indices of `cases[case_index]` in
// `epoch`.
//
// # Safety
// `study` must be a live handle; `result` null or valid for writes.
enum GpStatus gp_study_evaluate(const struct GpStudy *study,
                                size_t case_index,
                                size_t epoch,
                                struct GpReliability *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRIDPLAN_H */
