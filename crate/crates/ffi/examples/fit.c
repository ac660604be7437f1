/* Fit a G-Enum histogram to values read from stdin, one per line. */
#include <stdio.h>
#include <stdlib.h>

#include "mdlhist.h"

int main(void) {
    size_t len = 0, cap = 1024;
    double *values = malloc(cap * sizeof *values);
    double x;
    while (scanf("%lf", &x) == 1) {
        if (len == cap) {
            cap *= 2;
            values = realloc(values, cap * sizeof *values);
        }
        values[len++] = x;
    }

    MdlhHistogram *h = NULL;
    MdlhStatus status = mdlh_fit_genum(values, len, &h);
    free(values);
    if (status != MDLH_STATUS_OK) {
        fprintf(stderr, "fit failed (%d): %s\n", (int)status, mdlh_last_error_message());
        return 1;
    }

    size_t k = mdlh_histogram_k(h);
    double *edges = malloc((k + 1) * sizeof *edges);
    double *dens = malloc(k * sizeof *dens);
    mdlh_histogram_edges(h, edges, k + 1);
    mdlh_histogram_densities(h, dens, k);
    printf("K=%zu G=%llu cost=%.6f\n", k, (unsigned long long)mdlh_histogram_granularity(h),
           mdlh_histogram_cost(h));
    for (size_t i = 0; i < k; i++) {
        printf("%.17g %.17g %.17g\n", edges[i], edges[i + 1], dens[i]);
    }
    free(edges);
    free(dens);
    mdlh_histogram_free(h);
    return 0;
}
