#include "udyn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace udyn {

namespace {

double root_nlogn(std::int64_t n) {
    return std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
}

Configuration mirrored(const Configuration& cfg) { return {cfg.n, cfg.b, cfg.a}; }

// Normalize so the majority color is Alpha; claims are stated up to color swap.
Configuration normalized(const Configuration& cfg) {
    return cfg.a >= cfg.b ? cfg : mirrored(cfg);
}

// Lattice configuration with the requested q and bias at least s_min (the bias
// is bumped by one when n - q + s_min is odd).
Configuration make_config(std::int64_t n, std::int64_t q, std::int64_t s_min) {
    std::int64_t s = s_min;
    if (((n - q + s) & 1) != 0) ++s;
    const std::int64_t a = (n - q + s) / 2;
    return Configuration{n, a, n - q - a};
}

std::int64_t horizon_rounds(std::int64_t n, const ClaimParams& p) {
    return static_cast<std::int64_t>(
        std::ceil(p.horizon_factor * std::log(static_cast<double>(n))));
}

std::vector<std::int64_t> parallel_map_i64(
    std::int64_t trials, const RandomSource& base, int workers,
    const std::function<std::int64_t(std::int64_t, RandomSource&)>& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    std::vector<std::int64_t> out(static_cast<std::size_t>(trials), 0);
    auto run_range = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            RandomSource rng = base.derived(static_cast<std::uint64_t>(i));
            out[static_cast<std::size_t>(i)] = fn(i, rng);
        }
    };
    if (workers == 1 || trials < 2 * workers) {
        run_range(0, trials);
        return out;
    }
    std::vector<std::thread> threads;
    const std::int64_t chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(trials, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back(run_range, lo, hi);
    }
    for (auto& t : threads) t.join();
    return out;
}

}  // namespace

std::int64_t count_passes(std::int64_t trials, const RandomSource& base, int workers,
                          const std::function<bool(std::int64_t, RandomSource&)>& trial) {
    const std::vector<std::int64_t> flags = parallel_map_i64(
        trials, base, workers,
        [&trial](std::int64_t i, RandomSource& rng) -> std::int64_t {
            return trial(i, rng) ? 1 : 0;
        });
    std::int64_t passes = 0;
    for (std::int64_t f : flags) passes += f;
    return passes;
}

const std::vector<ClaimSpec>& claim_registry() {
    static const std::vector<ClaimSpec> registry = [] {
        std::vector<ClaimSpec> r;

        r.push_back({ClaimId::QLowerBound, "q_lower_bound", false, true, true,
                     [](const Configuration& c, const ClaimParams&) {
                         return 3 * std::llabs(c.s()) <= 2 * c.n;
                     },
                     [](const Configuration& c, const ClaimParams&, RandomSource& rng) {
                         return 18 * step(c, rng).q() >= c.n;
                     }});

        r.push_back({ClaimId::AIncrease, "a_increase", false, false, true,
                     [](const Configuration& c, const ClaimParams&) {
                         return 2 * c.q() >= c.n &&
                                static_cast<double>(c.a) >= std::log(static_cast<double>(c.n));
                     },
                     [](const Configuration& c, const ClaimParams&, RandomSource& rng) {
                         return static_cast<double>(step(c, rng).a) >=
                                (1.0 + 1.0 / 8.0) * static_cast<double>(c.a);
                     }});

        r.push_back({ClaimId::InformationSpreading, "information_spreading", true, false, true,
                     [](const Configuration& c, const ClaimParams&) {
                         const std::int64_t colored = c.a + c.b;
                         return colored >= 1 &&
                                static_cast<double>(colored) <
                                    2 * std::log(static_cast<double>(c.n));
                     },
                     [](const Configuration& c, const ClaimParams& p, RandomSource& rng) {
                         const double target = 2 * std::log(static_cast<double>(c.n));
                         Configuration cur = c;
                         for (std::int64_t t = 0, T = horizon_rounds(c.n, p); t < T; ++t) {
                             if (static_cast<double>(cur.a + cur.b) >= target) return true;
                             cur = step(cur, rng);
                         }
                         return static_cast<double>(cur.a + cur.b) >= target;
                     }});

        r.push_back({ClaimId::SIncrease, "s_increase", false, false, true,
                     [](const Configuration& c, const ClaimParams& p) {
                         return static_cast<double>(std::llabs(c.s())) >=
                                    p.gamma * root_nlogn(c.n) &&
                                18 * c.q() >= c.n;
                     },
                     [](const Configuration& c, const ClaimParams&, RandomSource& rng) {
                         const Configuration x = normalized(c);
                         const double s = static_cast<double>(x.s());
                         const double next = static_cast<double>(step(x, rng).s());
                         return s * (1.0 + 1.0 / 36.0) < next && next < 2.0 * s;
                     }});

        r.push_back({ClaimId::BDecrease, "b_decrease", false, false, true,
                     [](const Configuration& c, const ClaimParams&) {
                         const std::int64_t minority = std::min(c.a, c.b);
                         return 3 * std::llabs(c.s()) >= 2 * c.n &&
                                static_cast<double>(minority) >=
                                    std::log(static_cast<double>(c.n));
                     },
                     [](const Configuration& c, const ClaimParams&, RandomSource& rng) {
                         const Configuration x = normalized(c);
                         return static_cast<double>(step(x, rng).b) <=
                                static_cast<double>(x.b) * (1.0 - 1.0 / 9.0);
                     }});

        r.push_back({ClaimId::SPreserved, "s_preserved", false, false, true,
                     [](const Configuration& c, const ClaimParams&) {
                         return 3 * std::llabs(c.s()) >= 2 * c.n &&
                                static_cast<double>(c.q()) >= root_nlogn(c.n);
                     },
                     [](const Configuration& c, const ClaimParams&, RandomSource& rng) {
                         const Configuration x = normalized(c);
                         return 3 * step(x, rng).s() >= 2 * x.n;
                     }});

        r.push_back({ClaimId::QPreserved, "q_preserved", false, false, true,
                     [](const Configuration& c, const ClaimParams&) {
                         return 3 * std::llabs(c.s()) >= 2 * c.n &&
                                static_cast<double>(std::min(c.a, c.b)) >=
                                    2 * root_nlogn(c.n);
                     },
                     [](const Configuration& c, const ClaimParams&, RandomSource& rng) {
                         return static_cast<double>(step(c, rng).q()) > root_nlogn(c.n);
                     }});

        r.push_back({ClaimId::QDecrease, "q_decrease", false, false, true,
                     [](const Configuration& c, const ClaimParams&) {
                         const double root = root_nlogn(c.n);
                         return static_cast<double>(c.q()) >= 12 * root &&
                                3 * c.q() <= c.n &&
                                static_cast<double>(std::min(c.a, c.b)) <= 2 * root;
                     },
                     [](const Configuration& c, const ClaimParams&, RandomSource& rng) {
                         return static_cast<double>(step(c, rng).q()) <=
                                static_cast<double>(c.q()) * (1.0 - 1.0 / 9.0);
                     }});

        r.push_back({ClaimId::AWins, "a_wins", true, false, true,
                     [](const Configuration& c, const ClaimParams& p) {
                         const double root = root_nlogn(c.n);
                         return static_cast<double>(c.q()) <= p.gamma * root &&
                                static_cast<double>(std::min(c.a, c.b)) <= 2 * root &&
                                std::max(c.a, c.b) >= 1;
                     },
                     [](const Configuration& c, const ClaimParams& p, RandomSource& rng) {
                         const Configuration x = normalized(c);
                         Configuration cur = x;
                         for (std::int64_t t = 0, T = horizon_rounds(x.n, p); t < T; ++t) {
                             if (cur.a == cur.n) return true;
                             cur = step(cur, rng);
                         }
                         return cur.a == cur.n;
                     }});

        r.push_back({ClaimId::SDoesNotDecrease, "s_does_not_decrease", false, false, true,
                     [](const Configuration& c, const ClaimParams& p) {
                         return static_cast<double>(std::llabs(c.s())) >=
                                p.gamma * root_nlogn(c.n);
                     },
                     [](const Configuration& c, const ClaimParams& p, RandomSource& rng) {
                         const Configuration x = normalized(c);
                         return static_cast<double>(step(x, rng).s()) >=
                                (p.gamma - p.epsilon) * root_nlogn(x.n);
                     }});

        r.push_back({ClaimId::QBounded, "q_bounded", false, true, true,
                     [](const Configuration& c, const ClaimParams& p) {
                         return classify(c, PhaseParameters{p.gamma}).label == RegionLabel::H2;
                     },
                     [](const Configuration& c, const ClaimParams&, RandomSource& rng) {
                         const std::int64_t q = step(c, rng).q();
                         return 18 * q >= c.n && 2 * q <= c.n;
                     }});

        // Pass = absorbed at the initial minority color; the reported rate is
        // the minority-win estimate, not a w.h.p. quantity.
        r.push_back({ClaimId::ApxMinBias, "apxminbias", true, false, false,
                     [](const Configuration& c, const ClaimParams&) {
                         return c.s() != 0 && !is_absorbing(c);
                     },
                     [](const Configuration& c, const ClaimParams&, RandomSource& rng) {
                         const bool minority_beta = c.s() > 0;
                         const RunSummary run =
                             run_until_absorbed_summary(c, rng, default_max_rounds(c.n));
                         return minority_beta ? run.outcome == Outcome::AbsorbedBeta
                                              : run.outcome == Outcome::AbsorbedAlpha;
                     }});
        return r;
    }();
    return registry;
}

const ClaimSpec& claim_by_id(ClaimId id) {
    for (const ClaimSpec& s : claim_registry()) {
        if (s.id == id) return s;
    }
    throw std::logic_error("unknown claim id");
}

const ClaimSpec* claim_by_name(const std::string& name) {
    for (const ClaimSpec& s : claim_registry()) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

Configuration default_claim_config(ClaimId id, std::int64_t n, const ClaimParams& params) {
    const double root = root_nlogn(n);
    const auto ceil_i = [](double x) { return static_cast<std::int64_t>(std::ceil(x)); };
    switch (id) {
        case ClaimId::QLowerBound:
            // Balanced, no undecided: the worst admissible bias is far away.
            return Configuration{n, n / 2, n - n / 2};
        case ClaimId::AIncrease: {
            const std::int64_t q = (6 * n + 9) / 10;
            const std::int64_t a = std::max<std::int64_t>(1, (3 * n) / 20);
            return Configuration{n, a, n - q - a};
        }
        case ClaimId::InformationSpreading:
            return Configuration{n, 1, 0};
        case ClaimId::SIncrease:
            return make_config(n, n / 3, ceil_i(2 * params.gamma * root));
        case ClaimId::BDecrease:
        case ClaimId::SPreserved:
        case ClaimId::QPreserved: {
            const std::int64_t b = n / 10;
            const std::int64_t q = n / 10;
            return Configuration{n, n - b - q, b};
        }
        case ClaimId::QDecrease: {
            const std::int64_t q = n / 4;
            const std::int64_t b = static_cast<std::int64_t>(root);
            return Configuration{n, n - q - b, b};
        }
        case ClaimId::AWins: {
            const std::int64_t q = static_cast<std::int64_t>(params.gamma * root);
            const std::int64_t b = static_cast<std::int64_t>(root);
            return Configuration{n, n - q - b, b};
        }
        case ClaimId::SDoesNotDecrease:
            return make_config(n, n / 3, ceil_i(params.gamma * root));
        case ClaimId::QBounded:
            return make_config(n, n / 4, 0);
        case ClaimId::ApxMinBias: {
            const auto d = static_cast<std::int64_t>(
                std::llround(std::sqrt(static_cast<double>(n))));
            return Configuration{n, n / 3 + d, n / 3 - d};
        }
    }
    throw std::logic_error("unknown claim id");
}

ExperimentReport validate_claim(const ClaimSpec& spec, const Configuration& cfg,
                                std::int64_t trials, RandomSource& rng,
                                const ClaimParams& params, int workers) {
    require_valid(cfg);
    if (!spec.precondition(cfg, params)) {
        throw std::invalid_argument("claim " + spec.name +
                                    ": starting configuration violates the precondition");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const std::int64_t passes =
        count_passes(trials, rng, workers,
                     [&](std::int64_t, RandomSource& r) { return spec.trial(cfg, params, r); });
    const auto t1 = std::chrono::steady_clock::now();

    ExperimentReport rep;
    rep.id = spec.name;
    rep.n = cfg.n;
    rep.trials = trials;
    rep.pass_count = passes;
    rep.pass_rate = trials > 0 ? static_cast<double>(passes) / static_cast<double>(trials) : 0;
    rep.confidence = wilson_interval(passes, trials, kZ99);
    rep.seed = rng.seed();
    rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rep;
}

HittingTimes symmetry_breaking_time(std::int64_t n, const Configuration& start,
                                    std::int64_t trials, RandomSource& rng, int workers) {
    require_valid(start);
    if (start.n != n) throw std::invalid_argument("symmetry_breaking_time: n mismatch");
    const double target = root_nlogn(n);
    const std::int64_t max_rounds = default_max_rounds(n);

    HittingTimes out;
    out.rounds = parallel_map_i64(
        trials, rng, workers, [&](std::int64_t, RandomSource& r) -> std::int64_t {
            Configuration cur = start;
            for (std::int64_t t = 0; t <= max_rounds; ++t) {
                if (static_cast<double>(std::llabs(cur.s())) >= target) return t;
                if (is_absorbing(cur)) break;
                cur = step(cur, r);
            }
            return max_rounds + 1;  // timeout sentinel
        });
    std::vector<double> vals;
    vals.reserve(out.rounds.size());
    for (std::int64_t t : out.rounds) {
        if (t > max_rounds) ++out.timeouts;
        vals.push_back(static_cast<double>(std::min(t, max_rounds)));
    }
    out.median = quantile(vals, 0.5);
    out.q90 = quantile(vals, 0.9);
    return out;
}

Configuration scaling_start(std::int64_t n, StartKind kind, double gamma) {
    if (kind == StartKind::Balanced) {
        return Configuration{n, n / 2, n - n / 2};
    }
    const auto s = static_cast<std::int64_t>(std::ceil(2 * gamma * root_nlogn(n)));
    return make_config(n, n / 3, s);
}

ScalingResult convergence_scaling(const std::vector<std::int64_t>& n_list, StartKind kind,
                                  double gamma, std::int64_t trials, RandomSource& rng,
                                  int workers) {
    if (n_list.empty()) throw std::invalid_argument("convergence_scaling: empty n list");
    ScalingResult res;
    std::vector<double> xs, ys;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const std::int64_t n = n_list[ni];
        const Configuration start = scaling_start(n, kind, gamma);
        const std::int64_t max_rounds = default_max_rounds(n);
        const RandomSource base = rng.derived(ni);

        std::vector<std::int64_t> outcome_and_rounds = parallel_map_i64(
            trials, base, workers, [&](std::int64_t, RandomSource& r) -> std::int64_t {
                const RunSummary run = run_until_absorbed_summary(start, r, max_rounds);
                // Encode outcome in the low bits.
                std::int64_t code = 0;
                if (run.outcome == Outcome::AbsorbedAlpha) code = 1;
                else if (run.outcome == Outcome::AbsorbedBeta) code = 2;
                else if (run.outcome == Outcome::AbsorbedUndecided) code = 3;
                return run.rounds * 4 + code;
            });

        ScalingRow row;
        row.n = n;
        row.trials = trials;
        std::vector<double> rounds;
        rounds.reserve(outcome_and_rounds.size());
        for (std::int64_t v : outcome_and_rounds) {
            const std::int64_t code = v & 3;
            rounds.push_back(static_cast<double>(v / 4));
            if (code == 1 || code == 2) ++row.monochromatic;
            if (code == 1) ++row.alpha_wins;
            if (code == 0) ++row.timeouts;
        }
        row.median_rounds = quantile(rounds, 0.5);
        row.q90_rounds = quantile(rounds, 0.9);
        res.rows.push_back(row);
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(row.median_rounds);
    }
    if (xs.size() >= 2) res.fit = least_squares(xs, ys);
    return res;
}

MinorityWinResult minority_win_probability(std::int64_t n, std::int64_t trials,
                                           RandomSource& rng, bool minority_is_alpha,
                                           int workers) {
    Configuration start = default_claim_config(ClaimId::ApxMinBias, n, ClaimParams{});
    if (minority_is_alpha) start = mirrored(start);
    const Outcome minority_outcome =
        minority_is_alpha ? Outcome::AbsorbedAlpha : Outcome::AbsorbedBeta;
    const Outcome majority_outcome =
        minority_is_alpha ? Outcome::AbsorbedBeta : Outcome::AbsorbedAlpha;
    const std::int64_t max_rounds = default_max_rounds(n);

    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::int64_t> outcomes = parallel_map_i64(
        trials, rng, workers, [&](std::int64_t, RandomSource& r) -> std::int64_t {
            const RunSummary run = run_until_absorbed_summary(start, r, max_rounds);
            if (run.outcome == minority_outcome) return 0;
            if (run.outcome == majority_outcome) return 1;
            if (run.outcome == Outcome::AbsorbedUndecided) return 2;
            return 3;
        });
    const auto t1 = std::chrono::steady_clock::now();

    MinorityWinResult res;
    std::int64_t minority_wins = 0;
    for (std::int64_t o : outcomes) {
        if (o == 0) ++minority_wins;
        else if (o == 1) ++res.majority_wins;
        else if (o == 2) ++res.undecided;
    }
    res.report.id = "apxminbias";
    res.report.n = n;
    res.report.trials = trials;
    res.report.pass_count = minority_wins;
    res.report.pass_rate = static_cast<double>(minority_wins) / static_cast<double>(trials);
    res.report.confidence = wilson_interval(minority_wins, trials, kZ99);
    res.report.seed = rng.seed();
    res.report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return res;
}

std::vector<std::int64_t> lower_bound_experiment(std::int64_t n, std::int64_t trials,
                                                 RandomSource& rng,
                                                 const PhaseParameters& params, int workers) {
    const auto s = static_cast<std::int64_t>(
        std::llround(std::pow(static_cast<double>(n), 2.0 / 3.0)));
    if (static_cast<double>(s) < params.gamma * root_nlogn(n)) {
        throw std::invalid_argument(
            "lower_bound_experiment: n too small, n^{2/3} < gamma sqrt(n ln n)");
    }
    const Configuration start = make_config(n, n / 3, s);
    if (classify(start, params).label != RegionLabel::H4) {
        throw std::logic_error("lower_bound_experiment: start not in H4");
    }
    const std::int64_t max_rounds = default_max_rounds(n);

    return parallel_map_i64(trials, rng, workers,
                            [&](std::int64_t, RandomSource& r) -> std::int64_t {
                                Configuration cur = start;
                                std::int64_t in_h4 = 0;
                                while (in_h4 < max_rounds &&
                                       classify(cur, params).label == RegionLabel::H4) {
                                    cur = step(cur, r);
                                    ++in_h4;
                                }
                                return in_h4;
                            });
}

HypothesisEstimate estimate_H2_hypotheses(std::int64_t n, double h, double epsilon,
                                          std::int64_t sample_configs,
                                          std::int64_t trials_each, RandomSource& rng,
                                          double gamma, int workers) {
    const double theta = gamma * root_nlogn(n);
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    HypothesisEstimate est;
    est.h = h;
    est.epsilon = epsilon;
    est.m = sqrt_n * std::log(static_cast<double>(n));

    // Always include the worst case for Property 1: zero bias, q = n/2.
    std::vector<Configuration> configs;
    configs.push_back(make_config(n, n / 2, 0));
    RandomSource sampler = rng.derived(0xC0FFEE);
    while (static_cast<std::int64_t>(configs.size()) < sample_configs) {
        const std::int64_t q = sampler.uniform_int(n / 18, n / 2);
        const auto s = static_cast<std::int64_t>(sampler.uniform() * (theta - 1));
        configs.push_back(make_config(n, q, s));
    }

    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const Configuration& cfg = configs[ci];
        const double s = static_cast<double>(std::llabs(cfg.s()));
        const RandomSource base = rng.derived(ci + 1);
        const std::int64_t small_bias = count_passes(
            trials_each, base, workers, [&](std::int64_t, RandomSource& r) {
                return static_cast<double>(std::llabs(step(cfg, r).s())) < h * sqrt_n;
            });
        est.c1_hat = std::max(
            est.c1_hat, static_cast<double>(small_bias) / static_cast<double>(trials_each));

        if (s >= h * sqrt_n) {
            const RandomSource base2 = rng.derived(0x5000 + ci);
            const std::int64_t fails = count_passes(
                trials_each, base2, workers, [&](std::int64_t, RandomSource& r) {
                    return static_cast<double>(std::llabs(step(cfg, r).s())) <
                           (1.0 + epsilon) * s;
                });
            est.prop2_fail_rate =
                std::max(est.prop2_fail_rate,
                         static_cast<double>(fails) / static_cast<double>(trials_each));
        }
    }
    return est;
}

}  // namespace udyn
