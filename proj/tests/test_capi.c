/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "cocyclelab/cocyclelab.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  ccl_config* cfg = NULL;
  ccl_result* res = NULL;
  ccl_base* base = NULL;
  ccl_cocycle* cocycle = NULL;
  double exps[4] = {0};
  const double diag[2] = {2.0, 0.5};
  const char* text;

  EXPECT(strlen(ccl_version()) > 0);
  EXPECT(strcmp(ccl_status_name(CCL_CONFIG_ERROR), "ConfigError") == 0);

  EXPECT(ccl_config_parse("experiment = spectrum\nsteps = 2000\n", &cfg) == CCL_OK);
  EXPECT(ccl_config_set(cfg, "cocycle_params", "[3, 0.25]") == CCL_OK);
  EXPECT(ccl_config_set(cfg, "no_such_key", "1") == CCL_CONFIG_ERROR);
  EXPECT(strstr(ccl_last_error(), "no_such_key") != NULL);
  text = ccl_config_serialize(cfg);
  EXPECT(strstr(text, "steps = 2000") != NULL);

  /* no seed anywhere: config error */
  EXPECT(ccl_run(cfg, "capi_out_noseed", 0, 0, 1, &res) == CCL_OK);
  EXPECT(ccl_result_exit_code(res) == 1);
  ccl_result_free(res);

  EXPECT(ccl_run(cfg, "capi_out", 11, 1, 2, &res) == CCL_OK);
  EXPECT(ccl_result_exit_code(res) == 0);
  EXPECT(ccl_result_status(res) == CCL_OK);
  EXPECT(strstr(ccl_result_summary(res), "spectrum.csv") != NULL);
  ccl_result_free(res);
  ccl_config_free(cfg);

  EXPECT(ccl_config_parse("experiment = bogus\n", &cfg) == CCL_CONFIG_ERROR);
  EXPECT(ccl_config_load("does/not/exist.cfg", &cfg) == CCL_CONFIG_ERROR);

  EXPECT(ccl_base_create("rotation", NULL, 0, &base) == CCL_OK);
  EXPECT(ccl_cocycle_create(base, "diagonal", diag, 2, &cocycle) == CCL_OK);
  EXPECT(ccl_cocycle_dimension(cocycle) == 2);
  EXPECT(ccl_lyapunov(cocycle, 1, 1000, 10, exps, 1) == CCL_INVALID_ARGUMENT);
  EXPECT(ccl_lyapunov(cocycle, 1, 1000, 10, exps, 4) == CCL_OK);
  EXPECT(fabs(exps[0] - log(2.0)) < 1e-9);
  EXPECT(fabs(exps[1] + log(2.0)) < 1e-9);
  ccl_cocycle_free(cocycle);
  EXPECT(ccl_cocycle_create(base, "nope", NULL, 0, &cocycle) == CCL_UNKNOWN_NAME);
  ccl_base_free(base);
  EXPECT(ccl_base_create("torus", NULL, 0, &base) == CCL_UNKNOWN_NAME);

  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
