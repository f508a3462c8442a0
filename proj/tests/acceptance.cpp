// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Thresholds are fixed; measured values are printed so that
// every run doubles as a calibration record.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "udyn/bounds.hpp"
#include "udyn/chain.hpp"
#include "udyn/dynamics.hpp"
#include "udyn/experiments.hpp"
#include "udyn/graph.hpp"
#include "udyn/phase.hpp"
#include "udyn/stats.hpp"

using namespace udyn;

namespace {

int failures = 0;

void report(int index, const char* name, bool ok, const std::string& detail) {
    std::printf("criterion %2d (%s): %s  [%s]\n", index, name, ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// 1. Exact kernel expectations match the closed forms on every n=30 row.
void criterion_kernel_identity() {
    const std::int64_t n = 30;
    const StateSpace space(n);
    double worst = 0;
    for (std::int64_t idx = 0; idx < space.size(); ++idx) {
        const Configuration cfg = space.config(idx);
        const std::vector<double> row = one_step_distribution(cfg);
        double ea = 0, eb = 0, eq = 0;
        for (std::int64_t j = 0; j < space.size(); ++j) {
            const Configuration to = space.config(j);
            const double p = row[static_cast<std::size_t>(j)];
            ea += p * static_cast<double>(to.a);
            eb += p * static_cast<double>(to.b);
            eq += p * static_cast<double>(to.q());
        }
        const ExpectedNext e = expected_next(cfg);
        worst = std::max({worst, std::abs(ea - e.ea), std::abs(eb - e.eb),
                          std::abs(eq - e.eq)});
    }
    report(1, "kernel matches expectation formulas", worst <= 1e-9,
           fmt("max |error| = %.3g over %" PRId64 " rows", worst, space.size()));
}

// 2. TV distance between the exact one-step law and 10^6 samples.
void criterion_sampler_agreement() {
    const std::int64_t n = 30;
    const StateSpace space(n);
    double worst_tv = 0;
    for (const Configuration cfg : {Configuration{30, 10, 10}, Configuration{30, 15, 5}}) {
        const std::vector<double> exact = one_step_distribution(cfg);
        std::vector<std::int64_t> hist(static_cast<std::size_t>(space.size()), 0);
        RandomSource rng(1000 + cfg.a);
        const std::int64_t T = 1000000;
        for (std::int64_t t = 0; t < T; ++t) {
            const Configuration next = step(cfg, rng);
            ++hist[static_cast<std::size_t>(space.index(next.a, next.b))];
        }
        double tv = 0;
        for (std::int64_t j = 0; j < space.size(); ++j) {
            tv += std::abs(exact[static_cast<std::size_t>(j)] -
                           static_cast<double>(hist[static_cast<std::size_t>(j)]) /
                               static_cast<double>(T));
        }
        worst_tv = std::max(worst_tv, tv / 2);
    }
    report(2, "sampler agrees with exact kernel", worst_tv <= 0.01,
           fmt("max TV distance = %.5f", worst_tv));
}

// 3. Hand-enumerated golden rows.
void criterion_golden_rows() {
    const StateSpace s2(2);
    const std::vector<double> row2 = one_step_distribution({2, 1, 1});
    bool ok = true;
    for (auto [a, b] : {std::pair<std::int64_t, std::int64_t>{1, 1}, {1, 0}, {0, 1}, {0, 0}}) {
        ok = ok && std::abs(row2[static_cast<std::size_t>(s2.index(a, b))] - 0.25) <= 1e-12;
    }
    const StateSpace s3(3);
    const std::vector<double> row3 = one_step_distribution({3, 1, 1});
    const double p_undecided = row3[static_cast<std::size_t>(s3.index(0, 0))];
    ok = ok && std::abs(p_undecided - 1.0 / 27.0) <= 1e-12;
    report(3, "hand-enumerated golden rows", ok,
           fmt("n=2 row uniform, n=3 P(all-undecided) = %.12f", p_undecided));
}

// 4. Balanced starts absorb monochromatically in O(log n) with a clean fit.
void criterion_balanced_convergence() {
    RandomSource rng(4);
    const std::vector<std::int64_t> ns{1 << 10, 1 << 12, 1 << 14, 1 << 16};
    const ScalingResult res = convergence_scaling(ns, StartKind::Balanced, 1.0, 200, rng);
    std::int64_t mono = 0, total = 0;
    for (const ScalingRow& r : res.rows) {
        mono += r.monochromatic;
        total += r.trials;
    }
    const double rate = static_cast<double>(mono) / static_cast<double>(total);
    const bool ok = rate >= 0.99 && res.fit.r_squared >= 0.9;
    report(4, "balanced starts absorb in O(log n)", ok,
           fmt("monochromatic rate = %.4f, fit R^2 = %.4f, slope = %.2f", rate,
               res.fit.r_squared, res.fit.slope));
}

// 5. A 2 sqrt(n ln n) bias start absorbs at the majority within 50 ln n.
void criterion_biased_convergence() {
    const std::int64_t n = 1 << 16;
    const Configuration start = scaling_start(n, StartKind::Biased, 1.0);
    const std::int64_t horizon =
        static_cast<std::int64_t>(std::ceil(50.0 * std::log(static_cast<double>(n))));
    RandomSource rng(5);
    const std::int64_t trials = 500;
    const std::int64_t wins = count_passes(
        trials, rng, 0, [&](std::int64_t, RandomSource& r) {
            return run_until_absorbed_summary(start, r, horizon).outcome ==
                   Outcome::AbsorbedAlpha;
        });
    const double rate = static_cast<double>(wins) / static_cast<double>(trials);
    report(5, "biased starts absorb at the majority", rate >= 0.99,
           fmt("majority-win rate = %.4f over %" PRId64 " trials", rate, trials));
}

// 6. Minority-win probability from q=n/3, s=2 sqrt(n). The exact oracle value
// at n=36 is 0.0013002 (cross-checked against an independent per-node
// simulation and the aggregate sampler); the stated acceptance threshold of
// 0.02 exceeds the true probability of this start by a factor of ~15 and is
// unattainable, so this criterion is reported honestly red. The golden
// regression value and the MC/oracle agreement are verified alongside.
void criterion_minority_win() {
    const TransitionKernel k = build_kernel(36, KernelKind::Plain);
    const AbsorptionReport exact = absorption(k, {36, 18, 6});
    const bool golden_ok = std::abs(exact.p_beta - 0.0013002071973439678) <= 1e-9;

    RandomSource rng(6);
    const MinorityWinResult mc = minority_win_probability(90000, 2000, rng);

    const bool ok = golden_ok && exact.p_beta > 0.02 && mc.report.pass_rate > 0.02;
    report(6, "minority wins with constant probability", ok,
           fmt("exact p_minority(n=36) = %.10f (golden %s), MC(n=9e4) = %.4f; "
               "threshold 0.02 is unattainable at this start (see notes)",
               exact.p_beta, golden_ok ? "ok" : "MISMATCH", mc.report.pass_rate));
}

// 7. From s = n^{2/3} the process lingers in the slow region for Omega(log n).
void criterion_lower_bound() {
    const std::int64_t n = 1 << 20;
    RandomSource rng(7);
    const std::vector<std::int64_t> rounds =
        lower_bound_experiment(n, 200, rng, PhaseParameters{1.0});
    const double need = std::log2(static_cast<double>(n)) / 8.0;
    std::int64_t good = 0;
    for (std::int64_t r : rounds) {
        if (static_cast<double>(r) >= need) ++good;
    }
    const double rate = static_cast<double>(good) / 200.0;
    report(7, "slow region lasts Omega(log n)", rate >= 0.99,
           fmt("P(rounds >= %.2f) = %.3f", need, rate));
}

// 8. Every registered claim validator passes at scale.
void criterion_claim_suite() {
    const ClaimParams params;
    bool ok = true;
    std::string worst = "all claims within thresholds";
    for (const ClaimSpec& spec : claim_registry()) {
        const std::int64_t n = spec.horizon ? 100000 : 1000000;
        const Configuration cfg = default_claim_config(spec.id, n, params);
        RandomSource rng(800 + static_cast<std::uint64_t>(spec.id));
        const ExperimentReport rep = validate_claim(spec, cfg, 10000, rng, params, 0);
        bool claim_ok = true;
        if (spec.exp_small) {
            claim_ok = rep.pass_count == rep.trials;
        } else if (spec.whp) {
            claim_ok = rep.pass_rate >= 0.99;
        }
        if (!claim_ok) {
            ok = false;
            worst = fmt("%s pass_rate = %.4f", spec.name.c_str(), rep.pass_rate);
        }
    }
    report(8, "claim suite at scale", ok, worst);
}

// 9. Observed region transitions stay inside the allowed digraph.
void criterion_digraph_audit() {
    const std::int64_t n = 100000;
    const PhaseParameters params{1.0};
    // One representative start per region.
    const std::vector<Configuration> starts{
        {n, 20000, 20000},  // H1: q = 0.6n, s = 0
        {n, 37500, 37500},  // H2: q = n/4, s = 0
        {n, 49500, 49500},  // H3: q = 1000
        {n, 42500, 32500},  // H4: s = 10^4, q = n/4
        {n, 54500, 44500},  // H5: s = 10^4, q = 1000
        {n, 75000, 5000},   // H6: s = 0.7n, q = 0.2n
        {n, 84750, 14750},  // H7: s = 0.7n, q = 500
    };
    const RegionLabel expect[] = {RegionLabel::H1, RegionLabel::H2, RegionLabel::H3,
                                  RegionLabel::H4, RegionLabel::H5, RegionLabel::H6,
                                  RegionLabel::H7};
    std::int64_t transitions = 0, violations = 0;
    bool starts_ok = true;
    const std::int64_t per_start = 1429;  // ~10^4 trajectories total
    for (std::size_t si = 0; si < starts.size(); ++si) {
        if (classify(starts[si], params).label != expect[si]) starts_ok = false;
        RandomSource base(900 + si);
        for (std::int64_t t = 0; t < per_start; ++t) {
            RandomSource rng = base.derived(static_cast<std::uint64_t>(t));
            const RunResult run =
                run_until_absorbed(starts[si], rng, default_max_rounds(n));
            const auto audits = audit_trajectory(run.trajectory, params);
            transitions += static_cast<std::int64_t>(audits.size());
            for (const TransitionAudit& a : audits) {
                if (!a.allowed) ++violations;
            }
        }
    }
    const double frac =
        static_cast<double>(violations) / static_cast<double>(std::max<std::int64_t>(1, transitions));
    report(9, "phase digraph audit", starts_ok && frac < 1e-3,
           fmt("%" PRId64 " violations / %" PRId64 " transitions (%.2e)", violations,
               transitions, frac));
}

// 10. Pruned kernel: bias marginal preserved, no mass outside q' in [2, 18].
void criterion_pruned_kernel() {
    const std::int64_t n = 36;
    const PhaseParameters params{1.0};
    const StateSpace space(n);
    double worst_marginal = 0;
    double outside_mass = 0;
    std::int64_t h2_rows = 0;
    for (std::int64_t idx = 0; idx < space.size(); ++idx) {
        const Configuration cfg = space.config(idx);
        if (classify(cfg, params).label != RegionLabel::H2) continue;
        ++h2_rows;
        const std::vector<double> plain = one_step_distribution(cfg);
        const std::vector<double> pruned = pruned_one_step_distribution(cfg, params);
        std::map<std::int64_t, double> pm, qm;
        for (std::int64_t j = 0; j < space.size(); ++j) {
            const Configuration to = space.config(j);
            pm[to.s()] += plain[static_cast<std::size_t>(j)];
            qm[to.s()] += pruned[static_cast<std::size_t>(j)];
            if (to.q() < 2 || to.q() > 18) outside_mass += pruned[static_cast<std::size_t>(j)];
        }
        for (const auto& [s, mass] : pm) {
            worst_marginal = std::max(worst_marginal, std::abs(mass - qm[s]));
        }
    }
    report(10, "pruned kernel contract", worst_marginal <= 1e-12 && outside_mass == 0.0,
           fmt("%" PRId64 " H2 rows, max marginal error = %.3g, outside mass = %.3g",
               h2_rows, worst_marginal, outside_mass));
}

// 11. Bound grid vs empirical tails, 10^6 trials per case.
void criterion_bounds_suite() {
    struct Case {
        std::int64_t n;
        double p;
        double dev;          // delta for mult/reverse, lambda for add
        int form;            // 0 = mult, 1 = add, 2 = reverse
        TailDirection dir;
    };
    const std::vector<Case> grid{
        {1000, 0.3, 0.2, 0, TailDirection::Upper},
        {1000, 0.5, 0.1, 0, TailDirection::Upper},
        {500, 0.2, 0.3, 0, TailDirection::Upper},
        {2000, 0.4, 0.15, 0, TailDirection::Upper},
        {200, 0.5, 0.5, 0, TailDirection::Upper},
        {1000, 0.3, 0.2, 0, TailDirection::Lower},
        {1000, 0.5, 0.1, 0, TailDirection::Lower},
        {500, 0.2, 0.3, 0, TailDirection::Lower},
        {2000, 0.4, 0.15, 0, TailDirection::Lower},
        {200, 0.5, 0.5, 0, TailDirection::Lower},
        {1000, 0.5, 30, 1, TailDirection::Upper},
        {1000, 0.3, 50, 1, TailDirection::Upper},
        {500, 0.5, 20, 1, TailDirection::Lower},
        {2000, 0.2, 40, 1, TailDirection::Lower},
        {100, 0.5, 10, 1, TailDirection::Upper},
        {200, 0.3, 0.3, 2, TailDirection::Upper},
        {400, 0.25, 0.2, 2, TailDirection::Upper},
        {1000, 0.1, 0.2, 2, TailDirection::Upper},
        {300, 0.5, 0.15, 2, TailDirection::Lower},
        {500, 0.4, 0.125, 2, TailDirection::Lower},
    };
    int consistent = 0;
    RandomSource rng(11);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Case& c = grid[i];
        const double mu = static_cast<double>(c.n) * c.p;
        TailQuery q;
        q.n = c.n;
        q.p = c.p;
        q.direction = c.dir;
        double bound;
        bool reverse = false;
        if (c.form == 0) {
            bound = chernoff_mult(mu, c.dev, c.dir);
            q.threshold = c.dir == TailDirection::Upper ? (1 + c.dev) * mu : (1 - c.dev) * mu;
        } else if (c.form == 1) {
            bound = chernoff_add(c.n, c.dev);
            q.threshold = c.dir == TailDirection::Upper ? mu + c.dev : mu - c.dev;
        } else {
            bound = reverse_chernoff(mu, c.dev, c.n);
            reverse = true;
            q.threshold = c.dir == TailDirection::Upper ? (1 + c.dev) * mu : (1 - c.dev) * mu;
        }
        RandomSource case_rng = rng.derived(i);
        const TailCheck check = empirical_tail_check(q, bound, reverse, 1000000, case_rng);
        if (check.consistent) ++consistent;
    }
    report(11, "concentration bound grid", consistent == static_cast<int>(grid.size()),
           fmt("%d / %zu cases consistent", consistent, grid.size()));
}

// 12. Expander mixing on a generated (2000, 32) graph and K4 mean agreement.
void criterion_expander_suite() {
    RandomSource rng(12);
    const Graph g = random_regular_graph(2000, 32, rng);
    const double lambda = spectral_lambda(g);
    std::vector<std::int32_t> perm(2000);
    for (int i = 0; i < 2000; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::int64_t mixing_violations = 0;
    for (int t = 0; t < 200; ++t) {
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        const auto ks = rng.uniform_int(1, 1999);
        std::vector<std::int32_t> S(perm.begin(), perm.begin() + ks);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        const auto kt = rng.uniform_int(1, 1999);
        std::vector<std::int32_t> T(perm.begin(), perm.begin() + kt);
        const Discrepancy d = discrepancy(g, S, T, lambda);
        if (std::abs(d.value) > d.bound + 1e-9) ++mixing_violations;
    }

    Graph k4;
    k4.n = 4;
    k4.d = 3;
    k4.adjacency = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    const GraphState st = GraphState::uniform_blocks(4, 2, 2);
    const ExpectedNext e = expected_next_graph(k4, st);
    RandomSource step_rng(1212);
    const std::int64_t T = 100000;
    double sum = 0, sumsq = 0;
    for (std::int64_t t = 0; t < T; ++t) {
        const double a = static_cast<double>(graph_step(k4, st, step_rng).counts().a);
        sum += a;
        sumsq += a * a;
    }
    const double mean = sum / T;
    const double se = std::sqrt((sumsq / T - mean * mean) / T);
    const bool k4_ok = std::abs(mean - e.ea) <= 3 * se;

    report(12, "expander suite", mixing_violations == 0 && k4_ok,
           fmt("lambda = %.3f, mixing violations = %" PRId64
               ", K4 mean %.4f vs formula %.4f (SE %.4f)",
               lambda, mixing_violations, mean, e.ea, se));
}

}  // namespace

int main() {
    criterion_kernel_identity();
    criterion_sampler_agreement();
    criterion_golden_rows();
    criterion_balanced_convergence();
    criterion_biased_convergence();
    criterion_minority_win();
    criterion_lower_bound();
    criterion_claim_suite();
    criterion_digraph_audit();
    criterion_pruned_kernel();
    criterion_bounds_suite();
    criterion_expander_suite();
    std::printf("%d of 12 criteria failed\n", failures);
    return failures;
}
