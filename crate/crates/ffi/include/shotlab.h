#ifndef SHOTLAB_H
#define SHOTLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ShotlabStatus {
  SHOTLAB_STATUS_OK = 0,
  SHOTLAB_STATUS_NULL_POINTER = 1,
  SHOTLAB_STATUS_INVALID_ARGUMENT = 2,
  SHOTLAB_STATUS_PARSE = 3,
  SHOTLAB_STATUS_IO = 4,
  SHOTLAB_STATUS_EMPTY = 5,
  SHOTLAB_STATUS_CONFIG = 6,
  SHOTLAB_STATUS_MODEL = 7,
  SHOTLAB_STATUS_UTF8 = 8,
  SHOTLAB_STATUS_PANIC = 9,
} ShotlabStatus;

typedef enum ShotlabDecision {
  SHOTLAB_DECISION_CONFIRMED = 0,
  SHOTLAB_DECISION_REJECTED = 1,
  SHOTLAB_DECISION_TENTATIVE = 2,
} ShotlabDecision;

/**
 * A feature table read from CSV.
 */
typedef struct ShotlabFeatureTable ShotlabFeatureTable;

/**
 * A trained gradient-boosting model.
 */
typedef struct ShotlabGbmModel ShotlabGbmModel;

/**
 * The outcome of a Boruta run.
 */
typedef struct ShotlabImportance ShotlabImportance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *shotlab_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *shotlab_version(void);

/**
 * Area of the convex hull of `n` points given as parallel coordinate arrays.
 */
enum ShotlabStatus shotlab_hull_area(const double *xs, const double *ys, size_t n, double *out);

/**
 * Actual minus predicted three-point attempts per game.
 */
double shotlab_deviation(double actual_3pa, double predicted_3pa);

/**
 * Deviation weighted by the cube of three-point percentage.
 */
enum ShotlabStatus shotlab_propensity(double deviation, double three_pct, double *out);

enum ShotlabStatus shotlab_feature_table_read(const char *path, struct ShotlabFeatureTable **out);

/**
 * Number of plays in the table; 0 for a null handle.
 */
size_t shotlab_feature_table_len(const struct ShotlabFeatureTable *table);

/**
 * Copies column `column` of every play into `out`, which must hold
 * `shotlab_feature_table_len` values.
 */
enum ShotlabStatus shotlab_feature_table_column(const struct ShotlabFeatureTable *table,
                                                const char *column,
                                                double *out,
                                                size_t capacity);

void shotlab_feature_table_free(struct ShotlabFeatureTable *table);

/**
 * Loads a model from its JSON document.
 */
enum ShotlabStatus shotlab_gbm_from_json(const char *json, struct ShotlabGbmModel **out);

/**
 * Predicts from `n` named values; every model column must be present.
 */
enum ShotlabStatus shotlab_gbm_predict(const struct ShotlabGbmModel *model,
                                       const char *const *names,
                                       const double *values,
                                       size_t n,
                                       double *out);

void shotlab_gbm_free(struct ShotlabGbmModel *model);

/**
 * Runs Boruta over every feature column of `table` with `made` as the
 * target. `n_trees` of 0 keeps the default forest size.
 */
enum ShotlabStatus shotlab_importance_run(const struct ShotlabFeatureTable *table,
                                          uint64_t seed,
                                          size_t max_runs,
                                          size_t n_trees,
                                          struct ShotlabImportance **out);

/**
 * Number of Boruta runs executed.
 */
size_t shotlab_importance_runs(const struct ShotlabImportance *report);

enum ShotlabStatus shotlab_importance_decision(const struct ShotlabImportance *report,
                                               const char *feature,
                                               enum ShotlabDecision *out);

void shotlab_importance_free(struct ShotlabImportance *report);

/**
 * Generates a synthetic season into directory `dir`. `config_toml` uses
 * the command-line config format (a `[synth]` section); null means
 * defaults. `seed` overrides the file.
 */
enum ShotlabStatus shotlab_synth_write(const char *config_toml, uint64_t seed, const char *dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHOTLAB_H */
