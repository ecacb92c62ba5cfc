#ifndef REVIEW_PRICING_H
#define REVIEW_PRICING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum RpStatus {
  RP_STATUS_OK = 0,
  RP_STATUS_NULL_POINTER = 1,
  RP_STATUS_INVALID_UTF8 = 2,
  RP_STATUS_INVALID_ARGUMENT = 3,
  RP_STATUS_INVALID_INSTANCE = 4,
  RP_STATUS_PARSE = 5,
  RP_STATUS_OUT_OF_RANGE = 6,
  RP_STATUS_PANIC = 7,
} RpStatus;

/**
 * Opaque problem instance.
 */
typedef struct RpInstance RpInstance;

/**
 * Opaque record of a finished episode.
 */
typedef struct RpTrace RpTrace;

/**
 * Revenue-maximizing posted price over a type set.
 */
typedef struct RpOptimalPrice {
  double price;
  size_t type_index;
  double revenue;
} RpOptimalPrice;

/**
 * One round of an episode. `review` is NaN when the buyer did not purchase.
 */
typedef struct RpRound {
  uint64_t t;
  double price;
  size_t type_index;
  double threshold;
  bool bought;
  double revenue;
  double review;
} RpRound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *rp_last_error(void);

/**
 * Parses an instance file (TOML with `d`, `horizon_T`, `theta`, `q`,
 * `value_dists`).
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RpStatus rp_instance_from_toml(const char *toml, struct RpInstance **out);

/**
 * Builds the equal-value hard instance for horizon `horizon`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RpStatus rp_instance_hard(uint64_t horizon, size_t d, double eta, struct RpInstance **out);

/**
 * Releases an instance. Null is ignored.
 *
 * # Safety
 * `instance` must come from this library and not be used afterwards.
 */
void rp_instance_free(struct RpInstance *instance);

/**
 * Number of types, or 0 for a null handle.
 *
 * # Safety
 * `instance` must be null or a live handle.
 */
size_t rp_instance_d(const struct RpInstance *instance);

/**
 * Horizon, or 0 for a null handle.
 *
 * # Safety
 * `instance` must be null or a live handle.
 */
uint64_t rp_instance_horizon(const struct RpInstance *instance);

/**
 * Expected per-round revenue `p * sum_{i in set, theta_i >= p} q_i`, where
 * `mask[i]` marks membership of type `i`.
 *
 * # Safety
 * `instance` must be live, `mask` must point to `len` bools and `out` must
 * be valid.
 */
enum RpStatus rp_instance_rev(const struct RpInstance *instance,
                              double price,
                              const bool *mask,
                              size_t len,
                              double *out);

/**
 * Revenue-maximizing price over the types selected by `mask`.
 *
 * # Safety
 * As for [`rp_instance_rev`].
 */
enum RpStatus rp_instance_optimal_price(const struct RpInstance *instance,
                                        const bool *mask,
                                        size_t len,
                                        struct RpOptimalPrice *out);

/**
 * Plays one episode.
 *
 * `policy` is `"two_phase"`, `"fixed:<p>"` or `"oracle"`; `buyer` is
 * `"exact_lb"`, `"lb_plus_slack:<s>"`, `"omniscient"` or `"fixed_confidence"`.
 * A non-positive `lambda` selects the automatic value.
 *
 * # Safety
 * `instance` must be live, the strings NUL-terminated and `out` valid.
 */
enum RpStatus rp_run_episode(const struct RpInstance *instance,
                             const char *policy,
                             const char *buyer,
                             double eta,
                             double phase1_constant,
                             double lambda,
                             uint64_t seed,
                             struct RpTrace **out);

/**
 * Releases a trace. Null is ignored.
 *
 * # Safety
 * `trace` must come from this library and not be used afterwards.
 */
void rp_trace_free(struct RpTrace *trace);

/**
 * Number of rounds played, or 0 for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t rp_trace_len(const struct RpTrace *trace);

/**
 * Total revenue, or NaN for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
double rp_trace_total_revenue(const struct RpTrace *trace);

/**
 * Regret against the instance benchmark, or NaN for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
double rp_trace_regret(const struct RpTrace *trace);

/**
 * Copies round `index` (0-based) into `out`.
 *
 * # Safety
 * `trace` must be live and `out` valid.
 */
enum RpStatus rp_trace_round(const struct RpTrace *trace, size_t index, struct RpRound *out);

/**
 * Buyer lower confidence bound on round `t` from `n` reviews.
 *
 * # Safety
 * `reviews` must point to `n` doubles (it may be null when `n` is 0) and
 * `out` must be valid.
 */
enum RpStatus rp_compute_lb(const double *reviews, size_t n, uint64_t t, double eta, double *out);

/**
 * Phase-1 length `min(T, ceil(c ln(d T^2) / lambda) + 1)`.
 */
uint64_t rp_phase1_length(size_t d, uint64_t horizon, double lambda, double phase1_constant);

/**
 * Minimum type probability separating the two regret regimes.
 */
double rp_q_threshold(uint64_t horizon, size_t d, double eta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REVIEW_PRICING_H */
