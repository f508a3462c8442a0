/* C interface to the undecided-state dynamics toolkit.
 *
 * Conventions:
 *   - every fallible function returns UDYN_OK (0) or a UDYN_ERR_* code;
 *     udyn_last_error() gives a thread-local message for the last failure
 *   - handles are opaque and owned by the caller via the matching *_destroy
 *   - region labels, outcomes and tail directions travel as plain ints using
 *     the enums below
 */
#ifndef UDYN_H
#define UDYN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define UDYN_OK 0
#define UDYN_ERR_INVALID_ARGUMENT 1
#define UDYN_ERR_UNSUPPORTED 2
#define UDYN_ERR_IO 3
#define UDYN_ERR_NUMERIC 4
#define UDYN_ERR_INTERNAL 5

const char* udyn_version(void);
/* Message describing the most recent failure on this thread. */
const char* udyn_last_error(void);

/* ---- random source ---- */

typedef struct udyn_rng udyn_rng;

int udyn_rng_create(uint64_t seed, uint64_t stream, udyn_rng** out);
void udyn_rng_destroy(udyn_rng* rng);

/* ---- dynamics on the complete graph ---- */

enum {
    UDYN_OUTCOME_ALPHA = 0,
    UDYN_OUTCOME_BETA = 1,
    UDYN_OUTCOME_UNDECIDED = 2,
    UDYN_OUTCOME_TIMEOUT = 3,
};

const char* udyn_outcome_name(int outcome);

/* out = {E[A], E[B], E[Q], E[S]} after one round from (n, a, b). */
int udyn_expected_next(int64_t n, int64_t a, int64_t b, double out[4]);

int udyn_step(int64_t n, int64_t a, int64_t b, udyn_rng* rng, int64_t* a_out,
              int64_t* b_out);

int64_t udyn_default_max_rounds(int64_t n);

typedef struct udyn_trajectory udyn_trajectory;

/* Runs until absorption or max_rounds (<= 0 means the default cap) and keeps
 * the full trajectory, initial configuration included. */
int udyn_run(int64_t n, int64_t a, int64_t b, udyn_rng* rng, int64_t max_rounds,
             udyn_trajectory** out);
void udyn_trajectory_destroy(udyn_trajectory* traj);
int64_t udyn_trajectory_length(const udyn_trajectory* traj);
int udyn_trajectory_at(const udyn_trajectory* traj, int64_t i, int64_t* a,
                       int64_t* b);
int udyn_trajectory_outcome(const udyn_trajectory* traj);

/* ---- phase map ---- */

enum {
    UDYN_REGION_H1 = 0,
    UDYN_REGION_H2 = 1,
    UDYN_REGION_H3 = 2,
    UDYN_REGION_H4 = 3,
    UDYN_REGION_H5 = 4,
    UDYN_REGION_H6 = 5,
    UDYN_REGION_H7 = 6,
    UDYN_REGION_ABS_A = 7,
    UDYN_REGION_ABS_B = 8,
    UDYN_REGION_ABS_Q = 9,
};

enum {
    UDYN_SIGN_ALPHA = 0,
    UDYN_SIGN_BETA = 1,
    UDYN_SIGN_TIED = 2,
};

const char* udyn_region_name(int label);

int udyn_classify(int64_t n, int64_t a, int64_t b, double gamma, int* label,
                  int* sign);

/* 1 if the arrow from -> to is in the allowed phase digraph, 0 if not,
 * -1 on a bad label. */
int udyn_digraph_allowed(int from, int to);

/* Counts trajectory transitions that leave the allowed digraph. */
int udyn_audit_trajectory(const udyn_trajectory* traj, double gamma,
                          int64_t* violations);

/* ---- exact chain ---- */

enum {
    UDYN_KERNEL_PLAIN = 0,
    UDYN_KERNEL_PRUNED = 1,
};

typedef struct udyn_kernel udyn_kernel;

int udyn_kernel_build(int64_t n, int kind, double gamma, udyn_kernel** out);
void udyn_kernel_destroy(udyn_kernel* k);
int64_t udyn_kernel_states(const udyn_kernel* k);
/* out = {p_alpha, p_beta, p_undecided, expected_rounds} from (a, b). */
int udyn_kernel_absorption(const udyn_kernel* k, int64_t a, int64_t b,
                           double out[4]);
int udyn_kernel_export_csv(const udyn_kernel* k, const char* path);

/* ---- experiments ---- */

typedef struct {
    char id[32];
    int64_t n;
    int64_t trials;
    int64_t pass_count;
    double pass_rate;
    double ci_lo; /* 99% Wilson interval */
    double ci_hi;
    uint64_t seed;
    double wall_ms;
    int exp_small; /* claim expects zero failures at this scale */
    int whp;       /* claim is subject to the 0.99 pass-rate gate */
} udyn_claim_report;

int udyn_claim_count(void);
const char* udyn_claim_name(int idx);

/* Canonical starting configuration for the named claim; pass it back to
 * udyn_validate_claim or substitute your own. */
int udyn_default_claim_config(const char* name, int64_t n, double gamma,
                              double epsilon, int64_t* a, int64_t* b);

int udyn_validate_claim(const char* name, int64_t n, int64_t a, int64_t b,
                        double gamma, double epsilon, int64_t trials,
                        uint64_t seed, int workers, udyn_claim_report* out);

/* First round with |a-b| >= sqrt(n ln n). rounds (length = trials) may be
 * NULL; timed-out trials report max_rounds + 1 and count into *timeouts. */
int udyn_symmetry_breaking(int64_t n, int64_t a, int64_t b, int64_t trials,
                           uint64_t seed, int workers, int64_t* rounds,
                           int64_t* timeouts, double* median, double* q90);

enum {
    UDYN_START_BALANCED = 0,
    UDYN_START_BIASED = 1,
};

typedef struct {
    int64_t n;
    int64_t trials;
    double median_rounds;
    double q90_rounds;
    int64_t monochromatic;
    int64_t alpha_wins;
    int64_t timeouts;
} udyn_scaling_row;

/* rows must hold `count` entries; fit = {slope, intercept, r_squared} of
 * median rounds against ln n. */
int udyn_convergence_scaling(const int64_t* ns, int64_t count, int start_kind,
                             double gamma, int64_t trials, uint64_t seed,
                             int workers, udyn_scaling_row* rows,
                             double fit[3]);

/* Starts at q = n/3 with a sqrt(n) initial bias and reports how often the
 * initial minority color wins. */
int udyn_minority_win(int64_t n, int64_t trials, uint64_t seed,
                      int minority_is_alpha, int workers,
                      udyn_claim_report* report, int64_t* majority_wins,
                      int64_t* undecided);

/* Consecutive initial rounds classified H4 from s = round(n^{2/3}), q = n/3;
 * rounds must hold `trials` entries. */
int udyn_lower_bound(int64_t n, int64_t trials, uint64_t seed, double gamma,
                     int workers, int64_t* rounds);

/* Monte Carlo estimates for the symmetry-breaking hypotheses at scale n:
 * out = {c1_hat, prop2_fail_rate, m}. */
int udyn_h2_hypotheses(int64_t n, double h, double epsilon,
                       int64_t sample_configs, int64_t trials_each,
                       uint64_t seed, double gamma, int workers,
                       double out[3]);

/* ---- dynamics on regular graphs ---- */

typedef struct udyn_graph udyn_graph;

int udyn_graph_random_regular(int64_t n, int64_t d, udyn_rng* rng,
                              udyn_graph** out);
int udyn_graph_read(const char* path, udyn_graph** out);
int udyn_graph_write(const udyn_graph* g, const char* path);
void udyn_graph_destroy(udyn_graph* g);
int udyn_graph_size(const udyn_graph* g, int64_t* n, int64_t* d);
int udyn_graph_lambda(const udyn_graph* g, double* lambda);

/* One consensus run from a random placement of a Alphas and b Betas. */
int udyn_graph_run(const udyn_graph* g, int64_t a, int64_t b, udyn_rng* rng,
                   int64_t max_rounds, int64_t* a_out, int64_t* b_out,
                   int64_t* rounds, int* outcome);

typedef struct {
    int64_t n;
    int64_t d;
    double lambda;
    int64_t pairs_checked;
    int64_t mixing_violations;
    double max_ratio;
    int64_t trials;
    int64_t majority_wins;
    int64_t timeouts;
} udyn_expander_report;

int udyn_expander_experiment(int64_t n, int64_t d, int64_t pairs,
                             int64_t trials, uint64_t seed,
                             udyn_expander_report* out);

/* ---- concentration bounds ---- */

enum {
    UDYN_TAIL_UPPER = 0,
    UDYN_TAIL_LOWER = 1,
};

int udyn_chernoff_mult(double mu, double delta, int direction, double* bound,
                       double* log_bound);
int udyn_chernoff_add(int64_t n, double lambda, double* bound,
                      double* log_bound);
int udyn_reverse_chernoff(double mu, double delta, int64_t n, double* bound,
                          double* log_bound);

typedef struct {
    double empirical;
    double std_error;
    double bound;
    int consistent;
} udyn_tail_check;

/* Samples Binomial(n, p) and compares the empirical tail beyond `threshold`
 * with `bound`; reverse = 1 treats the bound as a lower bound. */
int udyn_tail_check_run(int64_t n, double p, int direction, double threshold,
                        double bound, int reverse, int64_t trials,
                        udyn_rng* rng, udyn_tail_check* out);

#ifdef __cplusplus
}
#endif

#endif /* UDYN_H */
