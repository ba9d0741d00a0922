/* C interface to the grid-economy simulator. Every object is an opaque
 * handle; every call that can fail returns a ge_status and leaves a
 * human-readable message in ge_last_error() (thread-local). Strings returned
 * through char** are heap-allocated; release them with ge_string_free. */
#ifndef GRIDECON_H
#define GRIDECON_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ge_status {
    GE_OK = 0,
    GE_ERR_PARSE = 1,        /* malformed input (file, JSON, schema) */
    GE_ERR_DANGLING_REF = 2, /* a cross-reference names nothing */
    GE_ERR_INVARIANT = 3,    /* structurally valid but self-contradictory */
    GE_ERR_INFEASIBLE = 4,   /* a run missed its deadline or budget */
    GE_ERR_RUNTIME = 5,      /* I/O or internal failure */
    GE_ERR_BAD_ARGUMENT = 6  /* null handle, unknown format/mode string */
} ge_status;

typedef struct ge_scenario ge_scenario;
typedef struct ge_run ge_run;

const char* ge_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* ge_last_error(void);

/* ---- scenarios --------------------------------------------------------- */

ge_status ge_scenario_load(const char* path, ge_scenario** out);
ge_status ge_scenario_parse(const char* json_text, ge_scenario** out);
void ge_scenario_free(ge_scenario* sc);

/* Builds the full simulation world once and discards it, surfacing the
 * invariants that only fire at construction or publish time. */
ge_status ge_scenario_check(const ge_scenario* sc);

int64_t ge_scenario_provider_count(const ge_scenario* sc);
int64_t ge_scenario_broker_count(const ge_scenario* sc);
int64_t ge_scenario_job_count(const ge_scenario* sc);

/* Canonical JSON form; reparsing it reproduces the scenario. */
ge_status ge_scenario_to_json(const ge_scenario* sc, char** out);

/* Market directory contents at simulation start, as JSON. */
ge_status ge_directory_dump_json(const ge_scenario* sc, char** out);

/* ---- runs --------------------------------------------------------------- */

typedef struct ge_run_options {
    int has_seed;     /* nonzero: seed replaces the scenario's */
    uint64_t seed;
    const char* mode; /* "cost_opt" | "time_opt" | NULL to keep per-broker modes */
} ge_run_options;

/* Executes the scenario on a fresh engine. Infeasible outcomes still return
 * GE_OK; inspect ge_run_feasible. opts may be NULL. */
ge_status ge_run_scenario(const ge_scenario* sc, const ge_run_options* opts, ge_run** out);
void ge_run_free(ge_run* run);

/* 1 when every broker completed all jobs within deadline and budget. */
int ge_run_feasible(const ge_run* run);

/* format: "table", "json" or "csv" (csv columns: resource,price,jobs,cost,makespan) */
ge_status ge_run_render(const ge_run* run, const char* format, char** out);

/* Writes trace.csv, trace.jsonl, summary.txt and summary.json into dir,
 * creating it if needed; the summary then records the trace paths. */
ge_status ge_run_write_outputs(ge_run* run, const char* dir);

void ge_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* GRIDECON_H */
