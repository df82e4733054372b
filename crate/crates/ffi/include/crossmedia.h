#ifndef CROSSMEDIA_H
#define CROSSMEDIA_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes shared by every function in this library.
typedef enum CmStatus {
  CM_STATUS_OK = 0,
  CM_STATUS_NULL_POINTER = 1,
  CM_STATUS_INVALID_UTF8 = 2,
  CM_STATUS_INVALID_ARGUMENT = 3,
  CM_STATUS_LENGTH_MISMATCH = 4,
  CM_STATUS_PARSE = 5,
  CM_STATUS_IO = 6,
  CM_STATUS_INSUFFICIENT_DATA = 7,
  CM_STATUS_DEGENERATE = 8,
  CM_STATUS_RANK_DEFICIENT = 9,
  CM_STATUS_NO_CONVERGENCE = 10,
  CM_STATUS_BACKEND = 11,
  CM_STATUS_OUTPUT = 12,
  // The quantity exists but is undefined for this input (zero variance).
  CM_STATUS_UNDEFINED = 13,
  CM_STATUS_OUT_OF_RANGE = 14,
  CM_STATUS_PANIC = 15,
} CmStatus;

// An ingested corpus directory.
typedef struct CmCorpus CmCorpus;

typedef struct CmGranger CmGranger;

typedef struct CmHeatmap CmHeatmap;

// Exponentially smoothed event intensity on a regular grid.
typedef struct CmIntensity CmIntensity;

typedef struct CmLexicon CmLexicon;

// Heatmap geometry in seconds. A `half_life` of zero or less selects each
// series' average inter-event period.
typedef struct CmHeatmapSpec {
  int64_t window;
  int64_t stride;
  int64_t max_offset;
  int64_t offset_step;
  int64_t grid_step;
  double half_life;
} CmHeatmapSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the same thread.
const char *cm_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *cm_version(void);

// Pearson correlation of two equal-length arrays.
// Returns [`CmStatus::Undefined`] when either input has zero variance.
enum CmStatus cm_pearson(const double *x, const double *y, size_t n, double *out);

// Student t cumulative distribution function.
enum CmStatus cm_t_cdf(double t, double df, double *out);

// Fisher-Snedecor F cumulative distribution function.
enum CmStatus cm_f_cdf(double f, double d1, double d2, double *out);

// Two-sample t-test. `pooled` selects equal variances; otherwise Welch.
enum CmStatus cm_t_test(const double *a,
                        size_t na,
                        const double *b,
                        size_t nb,
                        bool pooled,
                        double *out_t,
                        double *out_df,
                        double *out_p);

// F-test of a restricted model against an unrestricted one.
enum CmStatus cm_f_test_nested(double ssr_restricted,
                               double ssr_unrestricted,
                               size_t q,
                               size_t df_denom,
                               double *out_f,
                               double *out_p);

// Jensen-Shannon divergence (base 2) of two distributions of length `n`.
enum CmStatus cm_jensen_shannon(const double *p, const double *q, size_t n, double *out);

// Loads and validates a corpus directory.
enum CmStatus cm_corpus_open(const char *path, struct CmCorpus **out);

void cm_corpus_free(struct CmCorpus *corpus);

// Total number of document events.
enum CmStatus cm_corpus_len(const struct CmCorpus *corpus, size_t *out);

enum CmStatus cm_corpus_candidate_count(const struct CmCorpus *corpus, size_t *out);

// Name of candidate `index`, valid for the lifetime of the corpus handle.
enum CmStatus cm_corpus_candidate(const struct CmCorpus *corpus, size_t index, const char **out);

// Number of events for a candidate and source kind
// (`"twitter"`, `"news"` or `"candidate_twitter"`).
enum CmStatus cm_corpus_group_len(const struct CmCorpus *corpus,
                                  const char *candidate,
                                  const char *source_kind,
                                  size_t *out);

// Smooths sorted or unsorted `timestamps` onto `t0, t0 + step, ... < t1`.
enum CmStatus cm_intensity_smooth(const int64_t *timestamps,
                                  size_t n,
                                  int64_t t0,
                                  int64_t t1,
                                  int64_t step,
                                  double half_life,
                                  struct CmIntensity **out);

void cm_intensity_free(struct CmIntensity *series);

// Borrowed view of the sampled values, valid until the handle is freed.
enum CmStatus cm_intensity_values(const struct CmIntensity *series,
                                  const double **out_values,
                                  size_t *out_len);

// Two-week windows, 12-hour stride, offsets up to 48 hours in 1-hour steps, 5-minute grid.
struct CmHeatmapSpec cm_heatmap_spec_default(void);

// Lag-correlation heatmap of `fixed` against windows of `shifted` moved by
// each offset. A positive offset means `fixed` leads.
enum CmStatus cm_heatmap_compute(const int64_t *fixed,
                                 size_t n_fixed,
                                 const int64_t *shifted,
                                 size_t n_shifted,
                                 const struct CmHeatmapSpec *spec,
                                 struct CmHeatmap **out);

void cm_heatmap_free(struct CmHeatmap *heatmap);

enum CmStatus cm_heatmap_shape(const struct CmHeatmap *heatmap, size_t *out_rows, size_t *out_cols);

// Offset in seconds of column `col`.
enum CmStatus cm_heatmap_offset(const struct CmHeatmap *heatmap, size_t col, int64_t *out);

// Start time of row `row`.
enum CmStatus cm_heatmap_row_start(const struct CmHeatmap *heatmap, size_t row, int64_t *out);

// Correlation at one cell; [`CmStatus::Undefined`] when a window had no variance.
enum CmStatus cm_heatmap_get(const struct CmHeatmap *heatmap, size_t row, size_t col, double *out);

// Tests whether `cause` helps predict `effect` at lags `1..=max_lag`.
enum CmStatus cm_granger_test(const double *effect,
                              const double *cause,
                              size_t n,
                              size_t max_lag,
                              struct CmGranger **out);

void cm_granger_free(struct CmGranger *result);

enum CmStatus cm_granger_lag_count(const struct CmGranger *result, size_t *out);

// F statistic and p-value at lag `lag` (1-based).
enum CmStatus cm_granger_lag(const struct CmGranger *result,
                             size_t lag,
                             double *out_f,
                             double *out_p);

// Mean of the per-lag p-values.
enum CmStatus cm_granger_average_p(const struct CmGranger *result, double *out);

// Loads a tab-separated `token<TAB>valence` lexicon.
enum CmStatus cm_lexicon_load(const char *path, struct CmLexicon **out);

void cm_lexicon_free(struct CmLexicon *lexicon);

// Compound sentiment score in `[-1, 1]`.
enum CmStatus cm_sentiment_score(const struct CmLexicon *lexicon,
                                 const char *text_utf8,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CROSSMEDIA_H */
