#ifndef FUSEDLINK_H
#define FUSEDLINK_H

#ifdef __cplusplus
extern "C" {
#endif

/* Entity linking toolkit, C interface.
 *
 * All functions return a status code:
 *   FEL_OK       success
 *   FEL_INVALID  bad input (missing/ill-formed config or data files)
 *   FEL_RUNTIME  internal failure (numerics, I/O mid-run, ...)
 * fel_last_error() describes the most recent failure on this thread. */

typedef enum fel_status {
  FEL_OK = 0,
  FEL_INVALID = 1,
  FEL_RUNTIME = 2
} fel_status;

/* Opaque key=value run configuration. */
typedef struct fel_config fel_config;

fel_config* fel_config_new(void);
void fel_config_free(fel_config* cfg);

/* Loads key=value lines, with optional [section] prefixes. */
fel_status fel_config_load(fel_config* cfg, const char* path);
fel_status fel_config_set(fel_config* cfg, const char* key, const char* value);
/* Returns the value or NULL; the pointer stays valid until the next
 * set/load on the same config. */
const char* fel_config_get(const fel_config* cfg, const char* key);

/* Pipeline entry points; see the config keys in the project README. */
fel_status fel_run_ingest(const fel_config* cfg);
fel_status fel_run_build_index(const fel_config* cfg);
fel_status fel_run_train_retriever(const fel_config* cfg);
fel_status fel_run_train_reader(const fel_config* cfg);
fel_status fel_run_disambiguate(const fel_config* cfg);
fel_status fel_run_link(const fel_config* cfg);
fel_status fel_run_evaluate(const fel_config* cfg);

/* Finite-difference gradient verification of a small model.
 * On FEL_OK, *max_rel_error holds the worst relative error found. */
fel_status fel_run_gradcheck(const fel_config* cfg, double* max_rel_error);

/* Message for the last failing call on this thread; empty string if none. */
const char* fel_last_error(void);

const char* fel_version(void);

#ifdef __cplusplus
}
#endif

#endif /* FUSEDLINK_H */
