#include <math.h>
#include <stdio.h>
#include "review_pricing.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            const char *msg = rp_last_error();                        \
            fprintf(stderr, "line %d: %s\n", __LINE__, msg ? msg : ""); \
            return 1;                                                 \
        }                                                             \
    } while (0)

static const char *INSTANCE =
    "d = 3\n"
    "horizon_T = 2000\n"
    "theta = [0.3, 0.6, 0.9]\n"
    "q = [0.2, 0.3, 0.5]\n"
    "[[value_dists]]\nkind = \"bernoulli\"\nparams = [0.3]\n"
    "[[value_dists]]\nkind = \"bernoulli\"\nparams = [0.6]\n"
    "[[value_dists]]\nkind = \"bernoulli\"\nparams = [0.9]\n";

int main(void) {
    RpInstance *inst = NULL;
    CHECK(rp_instance_from_toml(INSTANCE, &inst) == RP_STATUS_OK);
    CHECK(rp_instance_d(inst) == 3);

    bool all[3] = {true, true, true};
    RpOptimalPrice best;
    CHECK(rp_instance_optimal_price(inst, all, 3, &best) == RP_STATUS_OK);
    CHECK(fabs(best.price - 0.6) < 1e-12 && best.type_index == 1);

    RpTrace *trace = NULL;
    CHECK(rp_run_episode(inst, "two_phase", "exact_lb", 0.1, 2.0, 0.0, 7, &trace) == RP_STATUS_OK);
    CHECK(rp_trace_len(trace) == 2000);
    RpRound first;
    CHECK(rp_trace_round(trace, 0, &first) == RP_STATUS_OK);
    CHECK(first.t == 1 && first.price == 0.0 && first.bought);
    CHECK(rp_trace_round(trace, 2000, &first) == RP_STATUS_OUT_OF_RANGE);
    CHECK(rp_last_error() != NULL);

    printf("%.17g %.17g\n", rp_trace_total_revenue(trace), rp_trace_regret(trace));
    rp_trace_free(trace);
    rp_instance_free(inst);
    return 0;
}
