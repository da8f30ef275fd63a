/* Cohomology, spectrum, heat and walk on the directed 3-cycle. */
#include <stdio.h>
#include "pathhodge.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        PhStatus s_ = (call);                                              \
        if (s_ != PH_STATUS_OK) {                                          \
            fprintf(stderr, "%s failed: %d %s\n", #call, (int)s_,          \
                    ph_last_error_message());                              \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    PhDigraph *g = NULL;
    CHECK(ph_digraph_parse("0 1\n1 2\n2 0\n", &g));

    size_t h0 = 0, h1 = 0, b1 = 0;
    CHECK(ph_cohomology_dim(g, 0, &h0));
    CHECK(ph_cohomology_dim(g, 1, &h1));
    CHECK(ph_chain_betti(g, 1, &b1));
    printf("H0=%zu H1=%zu b1=%zu\n", h0, h1, b1);

    double eig[8];
    size_t n_eig = 0;
    CHECK(ph_laplacian_eigenvalues(g, 0, eig, 8, &n_eig));
    printf("eigenvalues=%zu\n", n_eig);

    double u0[3] = {1.0, 1.0, 1.0}, ut[3];
    CHECK(ph_heat_apply(g, 0, 2.0, u0, 3, ut));
    printf("heat=%.6f %.6f %.6f\n", ut[0], ut[1], ut[2]);

    size_t start[2] = {0, 1};
    double e[3];
    CHECK(ph_walk_expectation(g, 1, start, 1, -1.0, 0, e, 3));
    printf("E0=%.6f %.6f %.6f\n", e[0], e[1], e[2]);

    PhStatus bad = ph_heat_apply(g, 0, -1.0, u0, 3, ut);
    printf("negative time -> %d (%s)\n", (int)bad, ph_last_error_message());

    ph_digraph_free(g);
    return 0;
}
