/* Public C interface of the federated modulation-classification simulator.
 *
 * The library is consumed through opaque handles and status codes; every
 * entry point returns FV_OK on success and a category code otherwise, with a
 * human-readable message available from fv_last_error() on the same thread.
 */
#ifndef FEDVACCINE_H
#define FEDVACCINE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fv_status {
  FV_OK = 0,
  FV_ERR_INVALID_ARGUMENT = 1,
  FV_ERR_CONFIG = 2,
  FV_ERR_IO = 3,
  FV_ERR_FORMAT = 4,
  FV_ERR_VERIFY_FAILED = 5,
  FV_ERR_INTERNAL = 6
} fv_status;

const char* fv_status_name(fv_status status);

/* Message describing the most recent failure on this thread. */
const char* fv_last_error(void);

const char* fv_version_string(void);

/* ---- configuration ----------------------------------------------------- */

typedef struct fv_config fv_config;

/* Defaults follow the reference protocol (10 clients, 100 global epochs,
 * 10 local epochs, batch 400, lr 0.001, queue 1500, 2 clusters, theta -12). */
fv_status fv_config_create(fv_config** out);

/* Line-oriented key=value file with '#' comments; empty path gives defaults.
 * The FV_SEED environment variable overrides the file's seed. */
fv_status fv_config_load(const char* path, fv_config** out);

fv_status fv_config_set(fv_config* cfg, const char* key, const char* value);
fv_status fv_config_get(const fv_config* cfg, const char* key, char* buf, size_t cap);

/* 16 hex digits identifying the resolved configuration. */
fv_status fv_config_hash(const fv_config* cfg, char* buf, size_t cap);

void fv_config_free(fv_config* cfg);

/* ---- datasets ----------------------------------------------------------- */

typedef struct fv_dataset fv_dataset;

/* Synthesizes the stratified training pool described by the config and
 * writes it to path in the dataset file format. */
fv_status fv_generate_dataset(const fv_config* cfg, const char* path);

fv_status fv_dataset_open(const char* path, fv_dataset** out);
fv_status fv_dataset_info(const fv_dataset* ds, uint64_t* frame_count, uint32_t* frame_len,
                          uint8_t* class_count);
void fv_dataset_free(fv_dataset* ds);

/* ---- experiments -------------------------------------------------------- */

/* Each runner writes out_base/<config-hash>/{config.resolved, metrics.csv,
 * summary.json} and copies the directory path into out_dir (when non-NULL).
 * Reruns with an identical config produce byte-identical metrics.csv. */
fv_status fv_run_theta_sweep(const fv_config* cfg, const char* out_base, char* out_dir,
                             size_t out_dir_cap);

fv_status fv_run_fl(const fv_config* cfg, const char* out_base, char* out_dir,
                    size_t out_dir_cap);

/* kind: "cluster", "queue" or "snr-range". */
fv_status fv_run_ablation(const fv_config* cfg, const char* kind, const char* out_base,
                          char* out_dir, size_t out_dir_cap);

/* Principal-axis projection of a stored dataset to k components; writes
 * projections.csv and summary.json. */
fv_status fv_run_pca(const fv_config* cfg, const char* dataset_path, int k, const char* out_base,
                     char* out_dir, size_t out_dir_cap);

/* Runs the oracle self-checks (gradients, SNR calibration, divergence and
 * aggregation algebra). Returns FV_OK only if every check passes; verbose
 * prints one line per check to stdout. */
fv_status fv_verify(int verbose);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FEDVACCINE_H */
