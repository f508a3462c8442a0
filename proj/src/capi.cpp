#include "udyn.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <stdexcept>
#include <string>

#include "udyn/bounds.hpp"
#include "udyn/chain.hpp"
#include "udyn/dynamics.hpp"
#include "udyn/experiments.hpp"
#include "udyn/graph.hpp"
#include "udyn/phase.hpp"
#include "udyn/random.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

// Runs the body, translating exceptions into error codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(UDYN_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(UDYN_ERR_INTERNAL, "out of memory");
    } catch (const std::runtime_error& e) {
        return fail(UDYN_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(UDYN_ERR_INTERNAL, e.what());
    }
}

int require(bool ok, const char* msg) {
    return ok ? UDYN_OK : fail(UDYN_ERR_INVALID_ARGUMENT, msg);
}

}  // namespace

struct udyn_rng {
    udyn::RandomSource src;
};

struct udyn_trajectory {
    udyn::RunResult result;
};

struct udyn_kernel {
    udyn::TransitionKernel kernel;
};

struct udyn_graph {
    udyn::Graph graph;
};

extern "C" {

const char* udyn_version(void) { return "1.0.0"; }

const char* udyn_last_error(void) { return g_last_error.c_str(); }

int udyn_rng_create(uint64_t seed, uint64_t stream, udyn_rng** out) {
    if (require(out != nullptr, "udyn_rng_create: out is NULL")) return UDYN_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new udyn_rng{udyn::RandomSource(seed, stream)};
        return UDYN_OK;
    });
}

void udyn_rng_destroy(udyn_rng* rng) { delete rng; }

const char* udyn_outcome_name(int outcome) {
    switch (outcome) {
        case UDYN_OUTCOME_ALPHA: return udyn::outcome_name(udyn::Outcome::AbsorbedAlpha);
        case UDYN_OUTCOME_BETA: return udyn::outcome_name(udyn::Outcome::AbsorbedBeta);
        case UDYN_OUTCOME_UNDECIDED: return udyn::outcome_name(udyn::Outcome::AbsorbedUndecided);
        case UDYN_OUTCOME_TIMEOUT: return udyn::outcome_name(udyn::Outcome::Timeout);
        default: return "unknown";
    }
}

int udyn_expected_next(int64_t n, int64_t a, int64_t b, double out[4]) {
    if (require(out != nullptr, "udyn_expected_next: out is NULL")) return UDYN_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const udyn::ExpectedNext e = udyn::expected_next({n, a, b});
        out[0] = e.ea;
        out[1] = e.eb;
        out[2] = e.eq;
        out[3] = e.es;
        return UDYN_OK;
    });
}

int udyn_step(int64_t n, int64_t a, int64_t b, udyn_rng* rng, int64_t* a_out,
              int64_t* b_out) {
    if (require(rng && a_out && b_out, "udyn_step: NULL argument")) return UDYN_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const udyn::Configuration next = udyn::step({n, a, b}, rng->src);
        *a_out = next.a;
        *b_out = next.b;
        return UDYN_OK;
    });
}

int64_t udyn_default_max_rounds(int64_t n) {
    return n >= 1 ? udyn::default_max_rounds(n) : 0;
}

int udyn_run(int64_t n, int64_t a, int64_t b, udyn_rng* rng, int64_t max_rounds,
             udyn_trajectory** out) {
    if (require(rng && out, "udyn_run: NULL argument")) return UDYN_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const int64_t cap = max_rounds > 0 ? max_rounds : udyn::default_max_rounds(n);
        *out = new udyn_trajectory{udyn::run_until_absorbed({n, a, b}, rng->src, cap)};
        return UDYN_OK;
    });
}

void udyn_trajectory_destroy(udyn_trajectory* traj) { delete traj; }

int64_t udyn_trajectory_length(const udyn_trajectory* traj) {
    return traj ? static_cast<int64_t>(traj->result.trajectory.size()) : 0;
}

int udyn_trajectory_at(const udyn_trajectory* traj, int64_t i, int64_t* a,
                       int64_t* b) {
    if (require(traj && a && b, "udyn_trajectory_at: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    if (i < 0 || i >= static_cast<int64_t>(traj->result.trajectory.size())) {
        return fail(UDYN_ERR_INVALID_ARGUMENT, "udyn_trajectory_at: index out of range");
    }
    const udyn::Configuration& c = traj->result.trajectory[static_cast<std::size_t>(i)];
    *a = c.a;
    *b = c.b;
    return UDYN_OK;
}

int udyn_trajectory_outcome(const udyn_trajectory* traj) {
    if (!traj) return UDYN_OUTCOME_TIMEOUT;
    return static_cast<int>(traj->result.outcome);
}

const char* udyn_region_name(int label) {
    if (label < 0 || label > UDYN_REGION_ABS_Q) return "unknown";
    return udyn::region_name(static_cast<udyn::RegionLabel>(label));
}

int udyn_classify(int64_t n, int64_t a, int64_t b, double gamma, int* label,
                  int* sign) {
    if (require(label != nullptr, "udyn_classify: label is NULL")) return UDYN_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const udyn::Region r = udyn::classify({n, a, b}, udyn::PhaseParameters{gamma});
        *label = static_cast<int>(r.label);
        if (sign) *sign = static_cast<int>(r.majority_sign);
        return UDYN_OK;
    });
}

int udyn_digraph_allowed(int from, int to) {
    if (from < 0 || from > UDYN_REGION_ABS_Q || to < 0 || to > UDYN_REGION_ABS_Q) return -1;
    static const udyn::PhaseDigraph digraph = udyn::allowed_digraph();
    return digraph.allowed(static_cast<udyn::RegionLabel>(from),
                           static_cast<udyn::RegionLabel>(to))
               ? 1
               : 0;
}

int udyn_audit_trajectory(const udyn_trajectory* traj, double gamma,
                          int64_t* violations) {
    if (require(traj && violations, "udyn_audit_trajectory: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const auto audits =
            udyn::audit_trajectory(traj->result.trajectory, udyn::PhaseParameters{gamma});
        int64_t bad = 0;
        for (const auto& a : audits) {
            if (!a.allowed) ++bad;
        }
        *violations = bad;
        return UDYN_OK;
    });
}

int udyn_kernel_build(int64_t n, int kind, double gamma, udyn_kernel** out) {
    if (require(out != nullptr, "udyn_kernel_build: out is NULL")) return UDYN_ERR_INVALID_ARGUMENT;
    if (kind != UDYN_KERNEL_PLAIN && kind != UDYN_KERNEL_PRUNED) {
        return fail(UDYN_ERR_INVALID_ARGUMENT, "udyn_kernel_build: bad kernel kind");
    }
    return guarded([&] {
        const auto k = kind == UDYN_KERNEL_PLAIN ? udyn::KernelKind::Plain
                                                 : udyn::KernelKind::Pruned;
        *out = new udyn_kernel{udyn::build_kernel(n, k, gamma)};
        return UDYN_OK;
    });
}

void udyn_kernel_destroy(udyn_kernel* k) { delete k; }

int64_t udyn_kernel_states(const udyn_kernel* k) {
    return k ? k->kernel.states().size() : 0;
}

int udyn_kernel_absorption(const udyn_kernel* k, int64_t a, int64_t b,
                           double out[4]) {
    if (require(k && out, "udyn_kernel_absorption: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const udyn::AbsorptionReport r = udyn::absorption(k->kernel, {k->kernel.n, a, b});
        out[0] = r.p_alpha;
        out[1] = r.p_beta;
        out[2] = r.p_undecided;
        out[3] = r.expected_rounds;
        return UDYN_OK;
    });
}

int udyn_kernel_export_csv(const udyn_kernel* k, const char* path) {
    if (require(k && path, "udyn_kernel_export_csv: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        std::ofstream os(path);
        if (!os) return fail(UDYN_ERR_IO, std::string("cannot open ") + path);
        udyn::export_kernel_csv(k->kernel, os);
        os.flush();
        if (!os) return fail(UDYN_ERR_IO, std::string("write failed: ") + path);
        return UDYN_OK;
    });
}

int udyn_claim_count(void) {
    return static_cast<int>(udyn::claim_registry().size());
}

const char* udyn_claim_name(int idx) {
    const auto& reg = udyn::claim_registry();
    if (idx < 0 || idx >= static_cast<int>(reg.size())) return nullptr;
    return reg[static_cast<std::size_t>(idx)].name.c_str();
}

namespace {

const udyn::ClaimSpec* find_claim(const char* name) {
    if (!name) return nullptr;
    return udyn::claim_by_name(name);
}

}  // namespace

int udyn_default_claim_config(const char* name, int64_t n, double gamma,
                              double epsilon, int64_t* a, int64_t* b) {
    if (require(a && b, "udyn_default_claim_config: NULL output")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    const udyn::ClaimSpec* spec = find_claim(name);
    if (!spec) return fail(UDYN_ERR_INVALID_ARGUMENT, "unknown claim name");
    return guarded([&] {
        udyn::ClaimParams params;
        params.gamma = gamma;
        params.epsilon = epsilon;
        const udyn::Configuration cfg = udyn::default_claim_config(spec->id, n, params);
        *a = cfg.a;
        *b = cfg.b;
        return UDYN_OK;
    });
}

int udyn_validate_claim(const char* name, int64_t n, int64_t a, int64_t b,
                        double gamma, double epsilon, int64_t trials,
                        uint64_t seed, int workers, udyn_claim_report* out) {
    if (require(out != nullptr, "udyn_validate_claim: out is NULL")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    const udyn::ClaimSpec* spec = find_claim(name);
    if (!spec) return fail(UDYN_ERR_INVALID_ARGUMENT, "unknown claim name");
    return guarded([&] {
        udyn::ClaimParams params;
        params.gamma = gamma;
        params.epsilon = epsilon;
        udyn::RandomSource rng(seed);
        const udyn::ExperimentReport r =
            udyn::validate_claim(*spec, {n, a, b}, trials, rng, params, workers);
        std::memset(out, 0, sizeof(*out));
        std::strncpy(out->id, r.id.c_str(), sizeof(out->id) - 1);
        out->n = r.n;
        out->trials = r.trials;
        out->pass_count = r.pass_count;
        out->pass_rate = r.pass_rate;
        out->ci_lo = r.confidence.lo;
        out->ci_hi = r.confidence.hi;
        out->seed = r.seed;
        out->wall_ms = r.wall_ms;
        out->exp_small = spec->exp_small ? 1 : 0;
        out->whp = spec->whp ? 1 : 0;
        return UDYN_OK;
    });
}

int udyn_symmetry_breaking(int64_t n, int64_t a, int64_t b, int64_t trials,
                           uint64_t seed, int workers, int64_t* rounds,
                           int64_t* timeouts, double* median, double* q90) {
    return guarded([&] {
        udyn::RandomSource rng(seed);
        const udyn::HittingTimes h =
            udyn::symmetry_breaking_time(n, {n, a, b}, trials, rng, workers);
        if (rounds) {
            for (std::size_t i = 0; i < h.rounds.size(); ++i) rounds[i] = h.rounds[i];
        }
        if (timeouts) *timeouts = h.timeouts;
        if (median) *median = h.median;
        if (q90) *q90 = h.q90;
        return UDYN_OK;
    });
}

int udyn_convergence_scaling(const int64_t* ns, int64_t count, int start_kind,
                             double gamma, int64_t trials, uint64_t seed,
                             int workers, udyn_scaling_row* rows,
                             double fit[3]) {
    if (require(ns && rows && count > 0, "udyn_convergence_scaling: bad arguments")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    if (start_kind != UDYN_START_BALANCED && start_kind != UDYN_START_BIASED) {
        return fail(UDYN_ERR_INVALID_ARGUMENT, "udyn_convergence_scaling: bad start kind");
    }
    return guarded([&] {
        udyn::RandomSource rng(seed);
        const std::vector<int64_t> n_list(ns, ns + count);
        const udyn::ScalingResult res = udyn::convergence_scaling(
            n_list,
            start_kind == UDYN_START_BALANCED ? udyn::StartKind::Balanced
                                              : udyn::StartKind::Biased,
            gamma, trials, rng, workers);
        for (int64_t i = 0; i < count; ++i) {
            const udyn::ScalingRow& r = res.rows[static_cast<std::size_t>(i)];
            rows[i] = {r.n,        r.trials,     r.median_rounds, r.q90_rounds,
                       r.monochromatic, r.alpha_wins, r.timeouts};
        }
        if (fit) {
            fit[0] = res.fit.slope;
            fit[1] = res.fit.intercept;
            fit[2] = res.fit.r_squared;
        }
        return UDYN_OK;
    });
}

int udyn_minority_win(int64_t n, int64_t trials, uint64_t seed,
                      int minority_is_alpha, int workers,
                      udyn_claim_report* report, int64_t* majority_wins,
                      int64_t* undecided) {
    return guarded([&] {
        udyn::RandomSource rng(seed);
        const udyn::MinorityWinResult res =
            udyn::minority_win_probability(n, trials, rng, minority_is_alpha != 0, workers);
        if (report) {
            std::memset(report, 0, sizeof(*report));
            std::strncpy(report->id, res.report.id.c_str(), sizeof(report->id) - 1);
            report->n = res.report.n;
            report->trials = res.report.trials;
            report->pass_count = res.report.pass_count;
            report->pass_rate = res.report.pass_rate;
            report->ci_lo = res.report.confidence.lo;
            report->ci_hi = res.report.confidence.hi;
            report->seed = res.report.seed;
            report->wall_ms = res.report.wall_ms;
        }
        if (majority_wins) *majority_wins = res.majority_wins;
        if (undecided) *undecided = res.undecided;
        return UDYN_OK;
    });
}

int udyn_lower_bound(int64_t n, int64_t trials, uint64_t seed, double gamma,
                     int workers, int64_t* rounds) {
    if (require(rounds != nullptr, "udyn_lower_bound: rounds is NULL")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        udyn::RandomSource rng(seed);
        const std::vector<int64_t> res = udyn::lower_bound_experiment(
            n, trials, rng, udyn::PhaseParameters{gamma}, workers);
        for (std::size_t i = 0; i < res.size(); ++i) rounds[i] = res[i];
        return UDYN_OK;
    });
}

int udyn_h2_hypotheses(int64_t n, double h, double epsilon,
                       int64_t sample_configs, int64_t trials_each,
                       uint64_t seed, double gamma, int workers,
                       double out[3]) {
    if (require(out != nullptr, "udyn_h2_hypotheses: out is NULL")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        udyn::RandomSource rng(seed);
        const udyn::HypothesisEstimate est = udyn::estimate_H2_hypotheses(
            n, h, epsilon, sample_configs, trials_each, rng, gamma, workers);
        out[0] = est.c1_hat;
        out[1] = est.prop2_fail_rate;
        out[2] = est.m;
        return UDYN_OK;
    });
}

int udyn_graph_random_regular(int64_t n, int64_t d, udyn_rng* rng,
                              udyn_graph** out) {
    if (require(rng && out, "udyn_graph_random_regular: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        *out = new udyn_graph{udyn::random_regular_graph(n, d, rng->src)};
        return UDYN_OK;
    });
}

int udyn_graph_read(const char* path, udyn_graph** out) {
    if (require(path && out, "udyn_graph_read: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        std::ifstream is(path);
        if (!is) return fail(UDYN_ERR_IO, std::string("cannot open ") + path);
        *out = new udyn_graph{udyn::read_edge_list(is)};
        return UDYN_OK;
    });
}

int udyn_graph_write(const udyn_graph* g, const char* path) {
    if (require(g && path, "udyn_graph_write: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        std::ofstream os(path);
        if (!os) return fail(UDYN_ERR_IO, std::string("cannot open ") + path);
        udyn::write_edge_list(g->graph, os);
        os.flush();
        if (!os) return fail(UDYN_ERR_IO, std::string("write failed: ") + path);
        return UDYN_OK;
    });
}

void udyn_graph_destroy(udyn_graph* g) { delete g; }

int udyn_graph_size(const udyn_graph* g, int64_t* n, int64_t* d) {
    if (require(g != nullptr, "udyn_graph_size: graph is NULL")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    if (n) *n = g->graph.n;
    if (d) *d = g->graph.d;
    return UDYN_OK;
}

int udyn_graph_lambda(const udyn_graph* g, double* lambda) {
    if (require(g && lambda, "udyn_graph_lambda: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        *lambda = udyn::spectral_lambda(g->graph);
        return UDYN_OK;
    });
}

int udyn_graph_run(const udyn_graph* g, int64_t a, int64_t b, udyn_rng* rng,
                   int64_t max_rounds, int64_t* a_out, int64_t* b_out,
                   int64_t* rounds, int* outcome) {
    if (require(g && rng, "udyn_graph_run: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const int64_t n = g->graph.n;
        const int64_t cap = max_rounds > 0 ? max_rounds : udyn::default_max_rounds(n);
        udyn::GraphState st = udyn::GraphState::random_placement(n, a, b, rng->src);
        int out_code = UDYN_OUTCOME_TIMEOUT;
        int64_t r = 0;
        for (; r < cap; ++r) {
            const udyn::Configuration c = st.counts();
            if (c.a == n) { out_code = UDYN_OUTCOME_ALPHA; break; }
            if (c.b == n) { out_code = UDYN_OUTCOME_BETA; break; }
            if (c.q() == n) { out_code = UDYN_OUTCOME_UNDECIDED; break; }
            st = udyn::graph_step(g->graph, st, rng->src);
        }
        const udyn::Configuration fin = st.counts();
        if (out_code == UDYN_OUTCOME_TIMEOUT) {
            if (fin.a == n) out_code = UDYN_OUTCOME_ALPHA;
            else if (fin.b == n) out_code = UDYN_OUTCOME_BETA;
            else if (fin.q() == n) out_code = UDYN_OUTCOME_UNDECIDED;
        }
        if (a_out) *a_out = fin.a;
        if (b_out) *b_out = fin.b;
        if (rounds) *rounds = r;
        if (outcome) *outcome = out_code;
        return UDYN_OK;
    });
}

int udyn_expander_experiment(int64_t n, int64_t d, int64_t pairs,
                             int64_t trials, uint64_t seed,
                             udyn_expander_report* out) {
    if (require(out != nullptr, "udyn_expander_experiment: out is NULL")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        udyn::RandomSource rng(seed);
        const udyn::ExpanderReport r = udyn::expander_experiment(n, d, pairs, trials, rng);
        out->n = r.n;
        out->d = r.d;
        out->lambda = r.lambda;
        out->pairs_checked = r.pairs_checked;
        out->mixing_violations = r.mixing_violations;
        out->max_ratio = r.max_ratio;
        out->trials = r.trials;
        out->majority_wins = r.majority_wins;
        out->timeouts = r.timeouts;
        return UDYN_OK;
    });
}

namespace {

udyn::TailDirection to_direction(int direction) {
    if (direction != UDYN_TAIL_UPPER && direction != UDYN_TAIL_LOWER) {
        throw std::invalid_argument("bad tail direction");
    }
    return direction == UDYN_TAIL_UPPER ? udyn::TailDirection::Upper
                                        : udyn::TailDirection::Lower;
}

}  // namespace

int udyn_chernoff_mult(double mu, double delta, int direction, double* bound,
                       double* log_bound) {
    return guarded([&] {
        const double lg = udyn::chernoff_mult_log(mu, delta, to_direction(direction));
        if (log_bound) *log_bound = lg;
        if (bound) *bound = std::exp(lg);
        return UDYN_OK;
    });
}

int udyn_chernoff_add(int64_t n, double lambda, double* bound,
                      double* log_bound) {
    return guarded([&] {
        const double lg = udyn::chernoff_add_log(n, lambda);
        if (log_bound) *log_bound = lg;
        if (bound) *bound = std::exp(lg);
        return UDYN_OK;
    });
}

int udyn_reverse_chernoff(double mu, double delta, int64_t n, double* bound,
                          double* log_bound) {
    return guarded([&] {
        const double lg = udyn::reverse_chernoff_log(mu, delta, n);
        if (log_bound) *log_bound = lg;
        if (bound) *bound = std::exp(lg);
        return UDYN_OK;
    });
}

int udyn_tail_check_run(int64_t n, double p, int direction, double threshold,
                        double bound, int reverse, int64_t trials,
                        udyn_rng* rng, udyn_tail_check* out) {
    if (require(rng && out, "udyn_tail_check_run: NULL argument")) {
        return UDYN_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        udyn::TailQuery q;
        q.n = n;
        q.p = p;
        q.direction = to_direction(direction);
        q.threshold = threshold;
        const udyn::TailCheck c =
            udyn::empirical_tail_check(q, bound, reverse != 0, trials, rng->src);
        out->empirical = c.empirical;
        out->std_error = c.std_error;
        out->bound = c.bound;
        out->consistent = c.consistent ? 1 : 0;
        return UDYN_OK;
    });
}

}  // extern "C"
