#include "udyn/dynamics.hpp"

#include <cmath>

namespace udyn {

ExpectedNext expected_next(const Configuration& cfg) {
    require_valid(cfg);
    const double n = static_cast<double>(cfg.n);
    const double a = static_cast<double>(cfg.a);
    const double b = static_cast<double>(cfg.b);
    const double q = static_cast<double>(cfg.q());
    ExpectedNext e;
    e.ea = a * (a + 2 * q) / n;
    e.eb = b * (b + 2 * q) / n;
    e.eq = (q * q + 2 * a * b) / n;
    e.es = e.ea - e.eb;
    return e;
}

StepDecomposition step_decomposed(const Configuration& cfg, RandomSource& rng) {
    require_valid(cfg);
    const std::int64_t n = cfg.n;
    const std::int64_t a = cfg.a;
    const std::int64_t b = cfg.b;
    const std::int64_t q = cfg.q();
    const double dn = static_cast<double>(n);

    StepDecomposition d;
    d.a_keep = rng.binomial(a, static_cast<double>(a + q) / dn);
    d.b_keep = rng.binomial(b, static_cast<double>(b + q) / dn);
    // Multinomial(q; a/n, b/n, q/n) via conditional binomials.
    d.q_to_a = rng.binomial(q, static_cast<double>(a) / dn);
    const std::int64_t rest = q - d.q_to_a;
    if (b + q > 0) {
        d.q_to_b = rng.binomial(rest, static_cast<double>(b) / static_cast<double>(b + q));
    }
    d.q_stay = rest - d.q_to_b;
    return d;
}

Configuration step(const Configuration& cfg, RandomSource& rng) {
    const StepDecomposition d = step_decomposed(cfg, rng);
    return Configuration{cfg.n, d.next_a(), d.next_b()};
}

bool is_absorbing(const Configuration& cfg) {
    require_valid(cfg);
    return cfg.a == cfg.n || cfg.b == cfg.n || cfg.q() == cfg.n;
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::AbsorbedAlpha: return "absorbed-alpha";
        case Outcome::AbsorbedBeta: return "absorbed-beta";
        case Outcome::AbsorbedUndecided: return "absorbed-undecided";
        case Outcome::Timeout: return "timeout";
    }
    return "?";
}

std::int64_t default_max_rounds(std::int64_t n) {
    return static_cast<std::int64_t>(std::ceil(100.0 * std::log(static_cast<double>(n < 2 ? 2 : n))));
}

namespace {

Outcome classify_absorbed(const Configuration& cfg) {
    if (cfg.a == cfg.n) return Outcome::AbsorbedAlpha;
    if (cfg.b == cfg.n) return Outcome::AbsorbedBeta;
    return Outcome::AbsorbedUndecided;
}

}  // namespace

RunResult run_until_absorbed(const Configuration& cfg, RandomSource& rng,
                             std::int64_t max_rounds) {
    require_valid(cfg);
    RunResult r;
    r.trajectory.push_back(cfg);
    Configuration cur = cfg;
    for (std::int64_t t = 0; t < max_rounds && !is_absorbing(cur); ++t) {
        cur = step(cur, rng);
        r.trajectory.push_back(cur);
    }
    r.outcome = is_absorbing(cur) ? classify_absorbed(cur) : Outcome::Timeout;
    return r;
}

RunSummary run_until_absorbed_summary(const Configuration& cfg, RandomSource& rng,
                                      std::int64_t max_rounds) {
    require_valid(cfg);
    RunSummary r;
    Configuration cur = cfg;
    std::int64_t t = 0;
    while (t < max_rounds && !is_absorbing(cur)) {
        cur = step(cur, rng);
        ++t;
    }
    r.rounds = t;
    r.final = cur;
    r.outcome = is_absorbing(cur) ? classify_absorbed(cur) : Outcome::Timeout;
    return r;
}

}  // namespace udyn
