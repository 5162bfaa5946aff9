/* dimpc — diffusion-informed MPC toolkit for battery energy arbitrage.
 *
 * C interface of the shared library. A run is opened from a config file,
 * optionally adjusted (seed, output directory), and then driven through the
 * four pipeline commands. All functions returning dimpc_status report
 * failures through the per-run message buffer (dimpc_run_last_error);
 * failures before a run exists go to dimpc_global_error().
 *
 * Handles are opaque and not thread-safe; use one run per thread.
 */

#ifndef DIMPC_H
#define DIMPC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dimpc_status {
    DIMPC_OK = 0,
    DIMPC_ERR_INVALID_ARGUMENT = 1, /* bad parameter or config value */
    DIMPC_ERR_IO = 2,               /* file missing or unreadable/unwritable */
    DIMPC_ERR_PARSE = 3,            /* malformed config, CSV or model file */
    DIMPC_ERR_STATE = 4,            /* command run out of order (e.g. no trained models) */
    DIMPC_ERR_NUMERIC = 5,          /* non-finite value where a finite one is required */
    DIMPC_ERR_SELFTEST = 6,         /* one or more self-test properties failed */
    DIMPC_ERR_INTERNAL = 7
} dimpc_status;

/* Opaque run: parsed config plus workspace state. */
typedef struct dimpc_run dimpc_run;

/* Library version, e.g. "0.1.0". Static storage, do not free. */
const char* dimpc_version(void);

/* Parses a run config file. Returns NULL on failure; see dimpc_global_error(). */
dimpc_run* dimpc_run_open(const char* config_path);

void dimpc_run_close(dimpc_run* run);

/* Message of the last failed call on this run. Empty string if none.
 * Valid until the next call on the same run. */
const char* dimpc_run_last_error(const dimpc_run* run);

/* Message of the last failure that had no run (e.g. dimpc_run_open). */
const char* dimpc_global_error(void);

/* Overrides the config's global seed for subsequent commands. */
dimpc_status dimpc_run_set_seed(dimpc_run* run, uint64_t seed);

/* Redirects all outputs (models, reports, plots) to the given directory. */
dimpc_status dimpc_run_set_output_dir(dimpc_run* run, const char* dir);

/* Trains the forecasters required by the configured arms and persists them
 * under the output directory. */
dimpc_status dimpc_cmd_train(dimpc_run* run);

/* Runs every configured arm over the evaluation span and writes
 * summary.csv, summary.txt and the per-arm step/window CSV reports. */
dimpc_status dimpc_cmd_backtest(dimpc_run* run);

/* Renders window_<k>.svg strategy plots and gaps.svg from an existing
 * backtest report directory. */
dimpc_status dimpc_cmd_plot(dimpc_run* run);

/* Runs the built-in property suite, printing one verdict line per property
 * to stdout. `run` may be NULL; a config only supplies the seed. Returns
 * DIMPC_ERR_SELFTEST if any property fails. */
dimpc_status dimpc_cmd_selftest(dimpc_run* run);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DIMPC_H */
