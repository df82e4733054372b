#include <math.h>
#include <stdio.h>
#include <string.h>

#include "crossmedia.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,     \
              cm_last_error_message());                          \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(void) {
  double x[] = {1, 2, 3, 4, 5};
  double y[] = {2, 4, 6, 8, 10};
  double flat[] = {3, 3, 3, 3, 3};
  double r = 0;

  CHECK(cm_pearson(x, y, 5, &r) == CM_STATUS_OK);
  CHECK(fabs(r - 1.0) < 1e-12);
  CHECK(cm_pearson(x, flat, 5, &r) == CM_STATUS_UNDEFINED);
  CHECK(strlen(cm_last_error_message()) > 0);
  CHECK(cm_pearson(x, y, 5, NULL) == CM_STATUS_NULL_POINTER);

  double p = 0;
  CHECK(cm_t_cdf(0.0, 7.0, &p) == CM_STATUS_OK);
  CHECK(fabs(p - 0.5) < 1e-12);

  CmHeatmapSpec spec = cm_heatmap_spec_default();
  CHECK(spec.window == 14 * 86400);

  CmGranger *g = NULL;
  double effect[64], cause[64];
  for (int i = 0; i < 64; i++) {
    cause[i] = sin(i * 0.7) + 0.1 * cos(i * 2.3);
    effect[i] = (i > 0 ? cause[i - 1] : 0) + 0.05 * sin(i * 1.9);
  }
  CHECK(cm_granger_test(effect, cause, 64, 2, &g) == CM_STATUS_OK);
  size_t lags = 0;
  CHECK(cm_granger_lag_count(g, &lags) == CM_STATUS_OK && lags == 2);
  double f = 0;
  CHECK(cm_granger_lag(g, 1, &f, &p) == CM_STATUS_OK);
  CHECK(p < 0.01);
  cm_granger_free(g);
  cm_granger_free(NULL);

  CmCorpus *c = NULL;
  CHECK(cm_corpus_open("/nonexistent/corpus", &c) == CM_STATUS_IO);
  CHECK(c == NULL);

  printf("ok %s\n", cm_version());
  return 0;
}
