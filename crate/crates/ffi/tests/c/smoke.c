#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ltp.h"

#define CHECK(cond)                                             \
    do {                                                        \
        if (!(cond)) {                                          \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__,     \
                    #cond, ltp_last_error_message());           \
            return 1;                                           \
        }                                                       \
    } while (0)

int main(void) {
    double ols = 0.0;
    CHECK(ltp_ols(0.5468, 0.9725, 0.0628, 0.3692, &ols) == LTP_STATUS_OK);
    CHECK(fabs(ols - 0.5944) < 5e-4);
    CHECK(ltp_ols(-1.0, 0.0, 0.0, 0.0, &ols) == LTP_STATUS_INVALID_ARGUMENT);

    char *suffix = NULL;
    CHECK(ltp_road_suffix("Patricia Circle", &suffix) == LTP_STATUS_OK);
    CHECK(suffix != NULL && strcmp(suffix, "Circle") == 0);
    ltp_string_free(suffix);

    LtpEmbedder *embedder = NULL;
    CHECK(ltp_embedder_new(32, &embedder) == LTP_STATUS_OK);
    double text[32];
    CHECK(ltp_embed_text(embedder, "lanes=2; suffix=Street", text, 32) == LTP_STATUS_OK);
    ltp_embedder_free(embedder);

    LtpFusionParams *params = NULL;
    CHECK(ltp_fusion_params_new(32, 8, 16, 5, &params) == LTP_STATUS_OK);
    double xy[] = {0.0, 0.0, 12.0, 3.0};
    double graph[16], fused[16];
    CHECK(ltp_graph_embed(xy, 2, 16, graph) == LTP_STATUS_OK);
    CHECK(ltp_fusion_params_set_lambda(params, 0.0) == LTP_STATUS_OK);
    CHECK(ltp_fuse(params, LTP_FUSE_MODE_WEIGHTED, graph, 16, text, 32, fused) == LTP_STATUS_OK);
    CHECK(memcmp(graph, fused, sizeof graph) == 0);
    ltp_fusion_params_free(params);

    printf("ok %s\n", ltp_version());
    return 0;
}
