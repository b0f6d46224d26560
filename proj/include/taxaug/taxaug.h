/* C interface to the taxaug library. All handles are opaque; every call
 * returns a status and, on failure, leaves a message readable through
 * taxaug_last_error() on the calling thread. */
#ifndef TAXAUG_TAXAUG_H
#define TAXAUG_TAXAUG_H

#include <stddef.h>
#include <stdint.h>

#if defined(TAXAUG_BUILDING_LIBRARY)
#define TAXAUG_API __attribute__((visibility("default")))
#else
#define TAXAUG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum taxaug_status {
  TAXAUG_OK = 0,
  TAXAUG_E_ARGUMENT = 1,    /* null handle or pointer, index out of range */
  TAXAUG_E_CONFIG = 2,      /* bad or missing configuration */
  TAXAUG_E_DATA = 3,        /* unusable manifest, feature file, images ... */
  TAXAUG_W_CONVERGENCE = 4, /* result produced, but some SVM fits hit max_iter */
  TAXAUG_E_IO = 5,
  TAXAUG_E_INTERNAL = 6
} taxaug_status;

typedef struct taxaug_config taxaug_config;
typedef struct taxaug_result taxaug_result;

TAXAUG_API const char* taxaug_version(void);
/* Message of the last failing call on this thread; "" when none. */
TAXAUG_API const char* taxaug_last_error(void);
/* Frees strings returned through char** out-parameters. */
TAXAUG_API void taxaug_string_free(char* s);

/* ---- configuration ---- */
TAXAUG_API taxaug_status taxaug_config_create(taxaug_config** out);
TAXAUG_API taxaug_status taxaug_config_load(const char* path, taxaug_config** out);
TAXAUG_API taxaug_status taxaug_config_set(taxaug_config* cfg, const char* key, const char* value);
/* Canonical value of one key, as echoed into reports. */
TAXAUG_API taxaug_status taxaug_config_get(const taxaug_config* cfg, const char* key, char** value);
TAXAUG_API taxaug_status taxaug_config_validate(const taxaug_config* cfg);
TAXAUG_API void taxaug_config_destroy(taxaug_config* cfg);

/* ---- runs ---- */
/* Both may return TAXAUG_W_CONVERGENCE together with a valid *out. */
TAXAUG_API taxaug_status taxaug_run_experiment(const taxaug_config* cfg, taxaug_result** out);
TAXAUG_API taxaug_status taxaug_run_ablation(const taxaug_config* cfg, taxaug_result** out);

TAXAUG_API size_t taxaug_result_count(const taxaug_result* r);
/* Pointer stays valid until the result is destroyed. */
TAXAUG_API taxaug_status taxaug_result_label(const taxaug_result* r, size_t i, const char** label);
TAXAUG_API taxaug_status taxaug_result_accuracy(const taxaug_result* r, size_t i, double* mean, double* std);
TAXAUG_API taxaug_status taxaug_result_best_ctv(const taxaug_result* r, size_t i, int* ctv);
TAXAUG_API taxaug_status taxaug_result_split_count(const taxaug_result* r, size_t i, size_t* splits);
TAXAUG_API int taxaug_result_convergence_warnings(const taxaug_result* r);
TAXAUG_API taxaug_status taxaug_result_json(const taxaug_result* r, char** out);
TAXAUG_API taxaug_status taxaug_result_table(const taxaug_result* r, char** out);
TAXAUG_API taxaug_status taxaug_result_ctv_csv(const taxaug_result* r, char** out);
/* report.json, table.txt and ctv_curve.csv under dir. */
TAXAUG_API taxaug_status taxaug_result_write(const taxaug_result* r, const char* dir);
TAXAUG_API void taxaug_result_destroy(taxaug_result* r);

/* ---- explanation ---- */
TAXAUG_API taxaug_status taxaug_render_heatmaps(const taxaug_config* cfg, const char* out_dir, size_t* written);

/* ---- data tools ---- */
typedef struct taxaug_fixture_options {
  int classes;
  int min_count;
  int max_count;
  int dims;
  int gan_per_class;
  int images; /* nonzero: write PGM images instead of a feature file */
  int image_size;
  uint64_t seed;
} taxaug_fixture_options;

TAXAUG_API void taxaug_fixture_defaults(taxaug_fixture_options* opts);
/* Writes manifest.csv plus features.fvec or images/. *records: manifest rows. */
TAXAUG_API taxaug_status taxaug_make_fixture(const taxaug_fixture_options* opts, const char* out_dir,
                                             size_t* records);

/* Mock features for an image manifest; rotation_max 0 disables rotated rows. */
TAXAUG_API taxaug_status taxaug_extract_mock(const char* manifest, const char* out_path, int grid,
                                             double rotation_max, double rotation_step, size_t* rows);

TAXAUG_API taxaug_status taxaug_fvec_validate(const char* path, uint32_t* dims, uint32_t* rows);

#ifdef __cplusplus
}
#endif

#endif
