/*
 * zeroday - benign-only network anomaly detection library.
 *
 * Trains outlier detectors (a feed-forward autoencoder and a one-class
 * SVM) on benign traffic features and evaluates how well each attack
 * class is flagged as anomalous across a threshold or nu sweep.
 *
 * All handles are opaque; every fallible call returns zd_status and
 * leaves a human-readable message in zd_last_error() (thread-local).
 * Strings returned as `const char*` borrow from the handle and stay
 * valid until the handle is freed or mutated. Strings returned as
 * `char**` are owned by the caller and released with zd_string_free().
 */

#ifndef ZERODAY_H
#define ZERODAY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zd_status {
  ZD_OK = 0,
  ZD_ERR_ARGUMENT = 1, /* bad call arguments */
  ZD_ERR_CONFIG = 2,   /* invalid configuration document */
  ZD_ERR_DATA = 3,     /* malformed or unusable input data */
  ZD_ERR_NUMERIC = 4,  /* numeric failure (e.g. solver non-convergence) */
  ZD_ERR_IO = 5,       /* filesystem failure */
  ZD_ERR_STATE = 6,    /* mismatched artifacts (wrong pipeline for model) */
  ZD_ERR_INTERNAL = 7
} zd_status;

const char* zd_version(void);

/* message for the most recent failing call on this thread */
const char* zd_last_error(void);

void zd_string_free(char* s);

/* ------------------------------------------------------------------ */
/* matrices                                                            */

typedef struct zd_matrix zd_matrix;

zd_status zd_matrix_create(size_t rows, size_t cols, const double* row_major,
                           zd_matrix** out);
size_t zd_matrix_rows(const zd_matrix* m);
size_t zd_matrix_cols(const zd_matrix* m);
/* row-major storage, rows*cols doubles */
const double* zd_matrix_data(const zd_matrix* m);
/* names may be NULL for generated column names */
zd_status zd_matrix_save_csv(const zd_matrix* m, const char* const* names,
                             const char* path);
zd_status zd_matrix_load_csv(const char* path, zd_matrix** out);
void zd_matrix_free(zd_matrix* m);

/* ------------------------------------------------------------------ */
/* datasets                                                            */

typedef struct zd_dataset zd_dataset;

/*
 * Loads one or two feature CSVs described by a JSON options document:
 *   {"train_file": "...", "test_file": "..." (optional),
 *    "label_column": "label", "benign_label": "benign",
 *    "force_categorical": [...], "ignore_columns": [...]}
 * Categorical columns are one-hot encoded with the vocabulary learned
 * from the train file, so both outputs share one column layout. `test`
 * may be NULL when no test_file is given.
 */
zd_status zd_dataset_load(const char* options_json, zd_dataset** train,
                          zd_dataset** test);

/*
 * Synthesizes a labeled dataset from a JSON spec:
 *   {"n_benign": N, "n_attack_classes": K, "n_per_attack": M (optional),
 *    "n_features": D, "benign_covariance_rank": R,
 *    "attack_offsets": [..K..], "noise_sigma": S, "seed": U64}
 */
zd_status zd_dataset_synth(const char* spec_json, zd_dataset** out);

zd_status zd_dataset_save_csv(const zd_dataset* ds, const char* path);
size_t zd_dataset_rows(const zd_dataset* ds);
size_t zd_dataset_cols(const zd_dataset* ds);
const char* zd_dataset_id(const zd_dataset* ds);
const char* zd_dataset_benign_label(const zd_dataset* ds);
size_t zd_dataset_class_count(const zd_dataset* ds);
/* classes sorted by name; returns NULL when idx is out of range */
const char* zd_dataset_class_name(const zd_dataset* ds, size_t idx);
size_t zd_dataset_class_rows(const zd_dataset* ds, const char* cls);
zd_status zd_dataset_features(const zd_dataset* ds, zd_matrix** out);

/* Benign-only split: shuffled by seed, cut at floor(fraction * n). */
zd_status zd_dataset_split_benign(const zd_dataset* ds, double train_fraction,
                                  int shuffle, uint64_t seed, zd_matrix** train,
                                  zd_matrix** validation);
void zd_dataset_free(zd_dataset* ds);

/* ------------------------------------------------------------------ */
/* preprocessing pipeline                                              */

typedef struct zd_pipeline zd_pipeline;

/*
 * Fits the benign-only transform on the dataset's benign rows: constant
 * and correlated columns dropped when prune != 0 (|r| strictly above the
 * threshold), then standard scaling. Attack rows never influence the
 * fit.
 */
zd_status zd_pipeline_fit(const zd_dataset* ds, double threshold, int prune,
                          zd_pipeline** out);
zd_status zd_pipeline_apply(const zd_pipeline* p, const zd_matrix* in,
                            zd_matrix** out);
size_t zd_pipeline_original_width(const zd_pipeline* p);
size_t zd_pipeline_kept_count(const zd_pipeline* p);
const char* zd_pipeline_kept_name(const zd_pipeline* p, size_t idx);
size_t zd_pipeline_dropped_count(const zd_pipeline* p);
const char* zd_pipeline_fingerprint(const zd_pipeline* p);
/* versioned JSON document; round-trips exactly */
zd_status zd_pipeline_save(const zd_pipeline* p, const char* path);
zd_status zd_pipeline_load(const char* path, zd_pipeline** out);
void zd_pipeline_free(zd_pipeline* p);

/* ------------------------------------------------------------------ */
/* autoencoder                                                         */

typedef struct zd_autoencoder zd_autoencoder;

/*
 * Builds an untrained model from a JSON config:
 *   {"layers": [in, hidden..., out], "activation": "tanh"|"relu"|"linear",
 *    "loss": "mse"|"mae", "l2": 0.0001}
 * Weights are seeded uniform fan-in/fan-out, biases zero.
 */
zd_status zd_ae_build(const char* config_json, uint64_t seed,
                      zd_autoencoder** out);

/*
 * Mini-batch training on benign matrices. train_json:
 *   {"epochs": 50, "batch_size": 1024, "learning_rate": 1e-3,
 *    "l2": 0.0001, "seed": U64, "threads": N}
 * When non-NULL, train_curve / val_curve must hold `epochs` doubles and
 * receive the per-epoch loss curves.
 */
zd_status zd_ae_train(zd_autoencoder* ae, const zd_matrix* train,
                      const zd_matrix* validation, const char* train_json,
                      double* train_curve, double* val_curve);

/* per-row reconstruction errors; scores must hold rows doubles */
zd_status zd_ae_score(const zd_autoencoder* ae, const zd_matrix* x,
                      double* scores);
size_t zd_ae_input_width(const zd_autoencoder* ae);
zd_status zd_ae_set_pipeline_fingerprint(zd_autoencoder* ae, const char* fp);
const char* zd_ae_fingerprint(const zd_autoencoder* ae);
zd_status zd_ae_save(const zd_autoencoder* ae, const char* path);
zd_status zd_ae_load(const char* path, zd_autoencoder** out);
void zd_ae_free(zd_autoencoder* ae);

/* fraction of scores strictly above the threshold; NaN on empty input */
double zd_detect_rate(const double* scores, size_t n, double threshold);

/*
 * Random hyper-parameter search. space_json:
 *   {"layer_stacks": [[...], ...], "activation": "tanh", "loss": "mse",
 *    "learning_rates": [...], "epoch_counts": [...], "l2_lambdas": [...],
 *    "budget": B, "seed": U64, "batch_size": 1024, "threads": N}
 * result_json receives {"best": {...}, "trials": [...]}.
 */
zd_status zd_ae_random_search(const char* space_json, const zd_matrix* train,
                              const zd_matrix* validation, char** result_json);

/* ------------------------------------------------------------------ */
/* one-class SVM                                                       */

typedef struct zd_ocsvm zd_ocsvm;

/*
 * Fits the RBF one-class SVM on a benign matrix. config_json:
 *   {"nu": 0.1, "gamma": "scale"|number, "tolerance": 1e-4,
 *    "max_passes": 1000, "seed": U64, "threads": N}
 */
zd_status zd_ocsvm_fit(const zd_matrix* train, const char* config_json,
                       zd_ocsvm** out);
zd_status zd_ocsvm_decision(const zd_ocsvm* m, const double* x, size_t dim,
                            double* out);
/* outlier=1 when the point falls outside the learned region */
zd_status zd_ocsvm_predict(const zd_ocsvm* m, const double* x, size_t dim,
                           int* outlier);
zd_status zd_ocsvm_detect_rate(const zd_ocsvm* m, const zd_matrix* x,
                               double* rate);
double zd_ocsvm_nu(const zd_ocsvm* m);
double zd_ocsvm_gamma(const zd_ocsvm* m);
size_t zd_ocsvm_support_vector_count(const zd_ocsvm* m);
zd_status zd_ocsvm_set_pipeline_fingerprint(zd_ocsvm* m, const char* fp);
const char* zd_ocsvm_fingerprint(const zd_ocsvm* m);
zd_status zd_ocsvm_save(const zd_ocsvm* m, const char* path);
zd_status zd_ocsvm_load(const char* path, zd_ocsvm** out);
void zd_ocsvm_free(zd_ocsvm* m);

/* ------------------------------------------------------------------ */
/* evaluation                                                          */

typedef struct zd_report zd_report;

/*
 * Zero-day protocol for the autoencoder: benign validation rows give
 * specificity, every attack class gives recall, per threshold.
 * options_json:
 *   {"thresholds": [...], "split_fraction": 0.75, "split_seed": U64,
 *    "benign_rows": "validation"|"all", "score_metric": "auto"|"mse"|"mae",
 *    "threads": N}
 */
zd_status zd_eval_autoencoder(const zd_autoencoder* ae, const zd_pipeline* p,
                              const zd_dataset* ds, const char* options_json,
                              zd_report** out);

/* Same protocol for fitted one-class SVM models, one column per nu. */
zd_status zd_eval_ocsvm(const zd_ocsvm* const* models, size_t n_models,
                        const zd_pipeline* p, const zd_dataset* ds,
                        const char* options_json, zd_report** out);

zd_status zd_report_set_meta(zd_report* r, const char* key, const char* value);
/* rate for a class name (or the benign label) at a sweep value, as a
 * fraction in [0,1] */
zd_status zd_report_rate(const zd_report* r, const char* cls, double sweep_value,
                         double* out);
zd_status zd_report_overall_accuracy(const zd_report* r, double sweep_value,
                                     double* out);
/* format: "csv", "json", "markdown" */
zd_status zd_report_render(const zd_report* r, const char* format, char** out);
zd_status zd_report_save(const zd_report* r, const char* format,
                         const char* path);
/* reads back the JSON form */
zd_status zd_report_load(const char* path, zd_report** out);

/*
 * Class-by-class pairing of two reports at one sweep value each.
 * Renders with the same formats as zd_report_render.
 */
typedef struct zd_comparison zd_comparison;

zd_status zd_report_compare(const zd_report* first, const zd_report* second,
                            double first_value, double second_value,
                            zd_comparison** out);
zd_status zd_comparison_render(const zd_comparison* c, const char* format,
                               char** out);
zd_status zd_comparison_save(const zd_comparison* c, const char* format,
                             const char* path);
void zd_comparison_free(zd_comparison* c);
void zd_report_free(zd_report* r);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ZERODAY_H */
