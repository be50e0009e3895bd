#include <stdio.h>
#include <assert.h>
#include <math.h>
#include "reebflow.h"

int main(void) {
    ReebflowLink *link = reebflow_link_new(1, 0, 10000, 7);
    assert(link != NULL);

    double reeb[2] = {1.0, 2.0};
    double grad[2];
    ReebflowVolumeReport report;
    ReebflowStatus st = reebflow_volume(link, reeb, 2, &report, grad);
    assert(st == REEBFLOW_STATUS_OK);
    printf("volume(1,2) = %.12f (relative %.6f)\n", report.volume, report.relative_volume);
    assert(fabs(report.relative_volume - 0.5) < 1e-10);

    double bad[2] = {-1.0, 2.0};
    st = reebflow_volume(link, bad, 2, &report, NULL);
    assert(st == REEBFLOW_STATUS_NOT_IN_CONE);
    printf("error: %s\n", reebflow_last_error_message());

    double start[2] = {0.5, 1.5};
    double minimum[2];
    st = reebflow_minimize(link, start, 2, minimum);
    assert(st == REEBFLOW_STATUS_OK);
    printf("minimizer = (%.9f, %.9f)\n", minimum[0], minimum[1]);
    assert(fabs(minimum[0] - 1.0) < 1e-7 && fabs(minimum[1] - 1.0) < 1e-7);

    ReebflowSoliton *sol = reebflow_soliton_new(1.0, 2.0);
    assert(sol != NULL);
    ReebflowSolitonSummary summary;
    st = reebflow_soliton_summary(sol, &summary);
    assert(st == REEBFLOW_STATUS_OK);
    printf("soliton 1:2 -> b=%.6f, min K^T=%.6f, residual=%.2e, mu=%.6f\n",
           summary.b, summary.kt_min, summary.residual, summary.mu);
    assert(summary.b > 0.0 && summary.kt_min > 0.0 && summary.residual < 1e-10);
    reebflow_soliton_free(sol);

    ReebflowEntropyReport entropy;
    st = reebflow_entropy(link, 1.0, 1.0, &entropy);
    assert(st == REEBFLOW_STATUS_OK && entropy.bound_ok == 1);
    printf("round entropy: V=%.6f mu=%.6f\n", entropy.v, entropy.mu);

    reebflow_link_free(link);
    printf("C ABI smoke test passed\n");
    return 0;
}
