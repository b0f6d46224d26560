/* Exercises the C interface from plain C. Argument: scratch directory. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "taxaug/taxaug.h"

static int failures = 0;

#define EXPECT(cond)                                                    \
  do {                                                                  \
    if (!(cond)) {                                                      \
      fprintf(stderr, "%s:%d: expected %s (last error: %s)\n", __FILE__, \
              __LINE__, #cond, taxaug_last_error());                    \
      ++failures;                                                       \
    }                                                                   \
  } while (0)

static char* join(const char* dir, const char* name) {
  size_t n = strlen(dir) + strlen(name) + 2;
  char* s = malloc(n);
  snprintf(s, n, "%s/%s", dir, name);
  return s;
}

int main(int argc, char** argv) {
  if (argc < 2) {
    fprintf(stderr, "usage: capi_test <scratch-dir>\n");
    return 2;
  }
  const char* dir = argv[1];
  char* manifest = join(dir, "manifest.csv");
  char* fvec = join(dir, "features.fvec");
  char* out = join(dir, "out");

  EXPECT(strcmp(taxaug_version(), "0.1.0") == 0);

  /* fixture */
  taxaug_fixture_options fo;
  taxaug_fixture_defaults(&fo);
  EXPECT(fo.classes == 20 && fo.dims == 512);
  fo.classes = 4;
  fo.max_count = 4;
  fo.dims = 12;
  fo.gan_per_class = 2;
  size_t records = 0;
  EXPECT(taxaug_make_fixture(&fo, dir, &records) == TAXAUG_OK);
  EXPECT(records > 8);
  uint32_t dims = 0, rows = 0;
  EXPECT(taxaug_fvec_validate(fvec, &dims, &rows) == TAXAUG_OK);
  EXPECT(dims == 12 && rows > records);
  EXPECT(taxaug_fvec_validate(manifest, &dims, &rows) == TAXAUG_E_DATA);
  EXPECT(strlen(taxaug_last_error()) > 0);

  /* config */
  taxaug_config* cfg = NULL;
  EXPECT(taxaug_config_create(&cfg) == TAXAUG_OK);
  EXPECT(taxaug_config_set(cfg, "no_such_key", "1") == TAXAUG_E_CONFIG);
  EXPECT(strstr(taxaug_last_error(), "no_such_key") != NULL);
  EXPECT(taxaug_config_set(cfg, "repeats", "x") == TAXAUG_E_CONFIG);
  EXPECT(taxaug_config_set(cfg, "manifest", manifest) == TAXAUG_OK);
  EXPECT(taxaug_config_set(cfg, "feature_file", fvec) == TAXAUG_OK);
  EXPECT(taxaug_config_validate(cfg) == TAXAUG_E_CONFIG); /* no seed yet */
  EXPECT(taxaug_config_set(cfg, "seed", "5") == TAXAUG_OK);
  EXPECT(taxaug_config_set(cfg, "repeats", "2") == TAXAUG_OK);
  EXPECT(taxaug_config_set(cfg, "ctv_grid", "50,100") == TAXAUG_OK);
  EXPECT(taxaug_config_validate(cfg) == TAXAUG_OK);
  char* v = NULL;
  EXPECT(taxaug_config_get(cfg, "repeats", &v) == TAXAUG_OK);
  EXPECT(v && strcmp(v, "2") == 0);
  taxaug_string_free(v);
  EXPECT(taxaug_config_get(cfg, "bogus", &v) == TAXAUG_E_CONFIG);

  /* run */
  taxaug_result* res = NULL;
  taxaug_status st = taxaug_run_experiment(cfg, &res);
  EXPECT(st == TAXAUG_OK || st == TAXAUG_W_CONVERGENCE);
  EXPECT(res != NULL);
  EXPECT(taxaug_result_count(res) == 1);
  const char* label = NULL;
  EXPECT(taxaug_result_label(res, 0, &label) == TAXAUG_OK && strcmp(label, "baseline") == 0);
  double mean = -1, sd = -1;
  EXPECT(taxaug_result_accuracy(res, 0, &mean, &sd) == TAXAUG_OK);
  EXPECT(mean >= 0.0 && mean <= 1.0 && sd >= 0.0);
  int ctv = 0;
  EXPECT(taxaug_result_best_ctv(res, 0, &ctv) == TAXAUG_OK && (ctv == 50 || ctv == 100));
  size_t splits = 0;
  EXPECT(taxaug_result_split_count(res, 0, &splits) == TAXAUG_OK && splits == 4);
  EXPECT(taxaug_result_accuracy(res, 1, &mean, &sd) == TAXAUG_E_ARGUMENT);
  char* json = NULL;
  EXPECT(taxaug_result_json(res, &json) == TAXAUG_OK);
  EXPECT(json && strstr(json, "\"schema\": \"taxaug-report/1\"") != NULL);
  taxaug_string_free(json);
  EXPECT(taxaug_result_write(res, out) == TAXAUG_OK);
  taxaug_result_destroy(res);

  /* ablation */
  EXPECT(taxaug_run_ablation(cfg, &res) <= TAXAUG_W_CONVERGENCE);
  EXPECT(taxaug_result_count(res) == 4);
  taxaug_result_destroy(res);

  /* unreadable manifest */
  EXPECT(taxaug_config_set(cfg, "manifest", "/nonexistent/manifest.csv") == TAXAUG_OK);
  res = NULL;
  EXPECT(taxaug_run_experiment(cfg, &res) == TAXAUG_E_IO);
  EXPECT(strstr(taxaug_last_error(), "ingest:") != NULL);
  EXPECT(res == NULL);

  /* null handling */
  EXPECT(taxaug_run_experiment(NULL, &res) == TAXAUG_E_ARGUMENT);
  EXPECT(taxaug_config_set(NULL, "seed", "1") == TAXAUG_E_ARGUMENT);
  EXPECT(taxaug_result_count(NULL) == 0);
  taxaug_config_destroy(cfg);
  taxaug_config_destroy(NULL);
  taxaug_result_destroy(NULL);

  free(manifest);
  free(fvec);
  free(out);
  if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
