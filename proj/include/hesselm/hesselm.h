/*
 * hesselm - Hessenberg-decomposition extreme learning machines with
 * closed-form leave-one-out regularization selection, second-order
 * difference plot entropy features, and a signal classification pipeline.
 *
 * C interface of the shared library. All functions returning
 * hesselm_status set a thread-local message retrievable through
 * hesselm_last_error() on failure. Objects are created and destroyed
 * through this interface only; handles are opaque.
 */

#ifndef HESSELM_H
#define HESSELM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hesselm_status {
  HESSELM_OK = 0,
  HESSELM_ERROR_INVALID_ARGUMENT = 1,
  HESSELM_ERROR_DIMENSION = 2,
  HESSELM_ERROR_SINGULAR = 3,
  HESSELM_ERROR_CONVERGENCE = 4,
  HESSELM_ERROR_PARSE = 5,
  HESSELM_ERROR_IO = 6,
  HESSELM_ERROR_TRAINING = 7,
  HESSELM_ERROR_VERSION = 8,
  HESSELM_ERROR_INTERNAL = 9
} hesselm_status;

typedef struct hesselm_config hesselm_config;
typedef struct hesselm_model hesselm_model;

const char* hesselm_version(void);
const char* hesselm_status_name(hesselm_status status);

/* Message describing the most recent failure on this thread. */
const char* hesselm_last_error(void);

/* Receives progress and warning lines (warnings are prefixed "warning:").
 * Pass NULL to restore the default (stderr). The callback may be invoked
 * from worker threads. */
typedef void (*hesselm_log_callback)(const char* line, void* user_data);
void hesselm_set_log_callback(hesselm_log_callback callback, void* user_data);

/* --- configuration ------------------------------------------------------
 * Keys are addressed as "section.key" (e.g. "preprocess.w1_ms"); every key
 * has a default. Values are strings and are validated when set. */

hesselm_status hesselm_config_create(hesselm_config** out_config);
hesselm_status hesselm_config_open(const char* path, hesselm_config** out_config);
hesselm_status hesselm_config_set(hesselm_config* config, const char* key, const char* value);
hesselm_status hesselm_config_get(const hesselm_config* config, const char* key,
                                  char* buffer, size_t buffer_size);
hesselm_status hesselm_config_save(const hesselm_config* config, const char* path);
void hesselm_config_free(hesselm_config* config);

/* Key catalogue, for discovering options programmatically. */
size_t hesselm_config_key_count(void);
const char* hesselm_config_key_name(size_t index);
const char* hesselm_config_key_default(size_t index);
const char* hesselm_config_key_help(size_t index);

/* --- pipeline commands --------------------------------------------------
 * Artifacts are written under data.output_dir; see the project README for
 * the file formats. */

hesselm_status hesselm_run_synth(const hesselm_config* config);
hesselm_status hesselm_run_preprocess(const hesselm_config* config);
hesselm_status hesselm_run_features(const hesselm_config* config);
hesselm_status hesselm_run_train(const hesselm_config* config);
hesselm_status hesselm_run_evaluate(const hesselm_config* config);
hesselm_status hesselm_run_sweep(const hesselm_config* config);
hesselm_status hesselm_run_pipeline(const hesselm_config* config);

/* --- models ------------------------------------------------------------- */

hesselm_status hesselm_model_open(const char* path, hesselm_model** out_model);
hesselm_status hesselm_model_save(const hesselm_model* model, const char* path);
void hesselm_model_free(hesselm_model* model);

size_t hesselm_model_feature_count(const hesselm_model* model);
size_t hesselm_model_class_count(const hesselm_model* model);
hesselm_status hesselm_model_class_label(const hesselm_model* model, size_t index,
                                         char* buffer, size_t buffer_size);
double hesselm_model_lambda(const hesselm_model* model);

/* Scores one or more feature rows (row-major, n_rows x n_features, in the
 * same raw feature space as features.csv; the stored normalization is
 * applied internally). out_scores receives n_rows x class_count values,
 * out_class_index the winning class per row; either may be NULL. */
hesselm_status hesselm_model_predict(const hesselm_model* model, const double* features,
                                     size_t n_rows, size_t n_features, double* out_scores,
                                     size_t* out_class_index);

/* Classifies a raw preprocessed segment; requires a model saved with its
 * feature extractor. out_scores receives class_count values. */
hesselm_status hesselm_model_predict_segment(const hesselm_model* model, const double* samples,
                                             size_t n_samples, double* out_scores,
                                             size_t* out_class_index);

#ifdef __cplusplus
}
#endif

#endif /* HESSELM_H */
