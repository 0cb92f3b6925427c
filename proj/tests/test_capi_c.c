/* The public header must compile and link as plain C. */

#include <math.h>
#include <stdio.h>

#include "qkdrot/qkdrot.h"

static int failures = 0;

#define EXPECT(cond)                                            \
  do {                                                          \
    if (!(cond)) {                                              \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                               \
    }                                                           \
  } while (0)

int main(void) {
  qkd_params params;
  qkd_channel* ch = NULL;
  qkd_bell_diagnostics d;
  qkd_key_rate_report r;

  params.num_bases = 4;
  params.theta = 3.14159265358979323846 / 4;
  params.sifting = QKD_SIFT_GENERIC;

  EXPECT(qkd_channel_depolarizing(0.1, &ch) == QKD_OK);
  EXPECT(qkd_edp_numerical(&params, ch, &d, NULL) == QKD_OK);
  EXPECT(fabs(d.e_b - 1.0 / 11.0) <= 1e-12);
  EXPECT(fabs(d.e_p - 3.0 / 22.0) <= 1e-12);
  EXPECT(qkd_key_rate(&params, QKD_LAMBDA_ADMISSIBLE_RANGE, d.e_b, d.p_con, &r) == QKD_OK);
  EXPECT(fabs(r.lambda_worst - d.e_b / 2) <= 1e-12);
  qkd_channel_free(ch);

  params.num_bases = 2;
  params.theta = 3.14159265358979323846 / 2;
  {
    qkd_error_relation rel;
    EXPECT(qkd_error_relation_get(&params, &rel) == QKD_ERR_DEGENERATE);
    EXPECT(qkd_last_error()[0] != '\0');
  }
  if (failures == 0) printf("C API: ok\n");
  return failures == 0 ? 0 : 1;
}
