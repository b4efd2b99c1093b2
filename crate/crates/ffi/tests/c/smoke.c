#include <math.h>
#include <stdio.h>
#include <string.h>

#include "layersum.h"

#define CHECK(cond)                                                        \
  do {                                                                     \
    if (!(cond)) {                                                         \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,               \
              ls_last_error_message());                                    \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  CHECK(strlen(ls_version()) > 0);

  LsStream *s = ls_stream_new(42, 0);
  int64_t v = 0;
  for (int i = 0; i < 1000; i++) {
    CHECK(ls_stream_next_int(s, 1, 100, &v) == LS_STATUS_OK);
    CHECK(v >= 1 && v <= 100);
  }
  CHECK(ls_stream_next_int(s, 9, 1, &v) == LS_STATUS_INVALID_RANGE);
  CHECK(ls_stream_draws(s) == 1000);
  ls_stream_free(s);

  LsTheoreticalMoments t;
  CHECK(ls_sum_moments(10000, 100, &t) == LS_STATUS_OK);
  CHECK(t.mean == 505000.0);

  int64_t offset = 0;
  size_t len = 0;
  CHECK(ls_exact_sum_pmf(2, 100, &offset, NULL, 0, &len) ==
        LS_STATUS_BUFFER_TOO_SMALL);
  double probs[199];
  CHECK(len == 199);
  CHECK(ls_exact_sum_pmf(2, 100, &offset, probs, len, &len) == LS_STATUS_OK);
  CHECK(offset == 2 && fabs(probs[99] - 0.01) < 1e-15);

  LsTestResult r;
  CHECK(ls_jarque_bera(0.0, -1.2, 1000, &r) == LS_STATUS_OK);
  CHECK(fabs(r.statistic - 60.0) < 1e-9);

  LsRunConfig cfg = {LS_LAYER_THREE, 0, 100, 500, 4, 50, 7};
  LsRun *run = NULL;
  CHECK(ls_run_new(&cfg, 1, &run) == LS_STATUS_OK);
  CHECK(ls_run_set_count(run) == 4);
  LsSetSummary sum;
  CHECK(ls_run_summary(run, 4, &sum) == LS_STATUS_OK);
  CHECK(sum.count == 500 && sum.realized_k == 0);
  CHECK(ls_run_summary(run, 5, &sum) == LS_STATUS_CONFIG);
  char *json = NULL;
  CHECK(ls_run_report_json(run, &json) == LS_STATUS_OK);
  CHECK(strstr(json, "\"summaries\"") != NULL);
  ls_string_free(json);
  ls_run_free(run);

  cfg.total_sets = 0;
  CHECK(ls_run_new(&cfg, 1, &run) == LS_STATUS_CONFIG && run == NULL);

  puts("ok");
  return 0;
}
