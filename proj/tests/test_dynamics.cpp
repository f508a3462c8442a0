#include <cmath>
#include <cstdlib>
#include <map>

#include "doctest.h"
#include "udyn/dynamics.hpp"

using namespace udyn;

TEST_CASE("expected_next closed-form values") {
    ExpectedNext e = expected_next({100, 40, 20});
    CHECK(e.ea == doctest::Approx(48).epsilon(1e-12));
    CHECK(e.eb == doctest::Approx(20).epsilon(1e-12));
    CHECK(e.eq == doctest::Approx(32).epsilon(1e-12));
    CHECK(e.es == doctest::Approx(28).epsilon(1e-12));

    e = expected_next({50, 50, 0});
    CHECK(e.ea == 50);
    CHECK(e.eb == 0);
    CHECK(e.eq == 0);
    CHECK(e.es == 50);

    e = expected_next({30, 0, 0});
    CHECK(e.ea == 0);
    CHECK(e.eq == 30);
    CHECK(e.es == 0);
}

TEST_CASE("expected_next components always sum to n") {
    RandomSource rng(11);
    for (int t = 0; t < 500; ++t) {
        const std::int64_t n = rng.uniform_int(1, 100000);
        const std::int64_t a = rng.uniform_int(0, n);
        const std::int64_t b = rng.uniform_int(0, n - a);
        const ExpectedNext e = expected_next({n, a, b});
        CHECK(std::abs(e.ea + e.eb + e.eq - static_cast<double>(n)) <= 1e-9 * n);
        CHECK(e.es == doctest::Approx(e.ea - e.eb).epsilon(1e-12));
    }
}

TEST_CASE("step_decomposed degenerate classes") {
    RandomSource rng(1);
    for (int t = 0; t < 20; ++t) {
        const StepDecomposition all_alpha = step_decomposed({10, 10, 0}, rng);
        CHECK(all_alpha.a_keep == 10);
        CHECK(all_alpha.b_keep == 0);
        CHECK(all_alpha.q_to_a == 0);
        CHECK(all_alpha.q_to_b == 0);
        CHECK(all_alpha.q_stay == 0);

        const StepDecomposition all_undecided = step_decomposed({10, 0, 0}, rng);
        CHECK(all_undecided.q_stay == 10);
        CHECK(all_undecided.a_keep == 0);
        CHECK(all_undecided.next_a() == 0);
    }
}

TEST_CASE("step_decomposed mean matches the expectation formula") {
    RandomSource rng(42);
    const std::int64_t T = 100000;
    double sum = 0, sumsq = 0;
    for (std::int64_t t = 0; t < T; ++t) {
        const StepDecomposition d = step_decomposed({100, 40, 20}, rng);
        const double v = static_cast<double>(d.next_a());
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / T;
    const double var = sumsq / T - mean * mean;
    const double se = std::sqrt(var / T);
    CHECK(std::abs(mean - 48.0) <= 3 * se);
}

TEST_CASE("step respects class boundaries") {
    RandomSource rng(5);
    for (int t = 0; t < 200; ++t) {
        CHECK(step({5, 5, 0}, rng) == Configuration{5, 5, 0});
        const Configuration next = step({5, 2, 3}, rng);
        // No undecided nodes: colored nodes can only keep or drop their color.
        CHECK(next.a <= 2);
        CHECK(next.b <= 3);
    }
}

TEST_CASE("step on (n=2, a=1, b=1) is uniform over four outcomes") {
    RandomSource rng(9);
    std::map<std::pair<std::int64_t, std::int64_t>, int> hist;
    const int T = 40000;
    for (int t = 0; t < T; ++t) {
        const Configuration c = step({2, 1, 1}, rng);
        ++hist[{c.a, c.b}];
    }
    CHECK(hist.size() == 4);
    for (const auto& [k, count] : hist) {
        // 5 sigma band around T/4 (sigma ~ sqrt(T*3/16) ~ 86.6)
        CHECK(std::abs(count - T / 4) < 450);
    }
}

TEST_CASE("absorbing states") {
    CHECK(is_absorbing({7, 7, 0}));
    CHECK(is_absorbing({7, 0, 7}));
    CHECK(is_absorbing({7, 0, 0}));
    CHECK_FALSE(is_absorbing({7, 3, 3}));
}

TEST_CASE("run_until_absorbed trivial starts") {
    RandomSource rng(3);
    RunResult r = run_until_absorbed({4, 4, 0}, rng, 10);
    CHECK(r.trajectory.size() == 1);
    CHECK(r.outcome == Outcome::AbsorbedAlpha);

    r = run_until_absorbed({4, 0, 0}, rng, 10);
    CHECK(r.outcome == Outcome::AbsorbedUndecided);
}

TEST_CASE("run_until_absorbed is deterministic per seed and stream") {
    RandomSource r1(77, 4), r2(77, 4);
    const RunResult a = run_until_absorbed({300, 100, 100}, r1, 2000);
    const RunResult b = run_until_absorbed({300, 100, 100}, r2, 2000);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    CHECK(a.outcome == b.outcome);
    for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
        CHECK(a.trajectory[i] == b.trajectory[i]);
    }
}

TEST_CASE("per-step invariants over random configurations") {
    RandomSource rng(123);
    for (int t = 0; t < 2000; ++t) {
        const std::int64_t n = rng.uniform_int(1, 5000);
        const std::int64_t a = rng.uniform_int(0, n);
        const std::int64_t b = rng.uniform_int(0, n - a);
        const Configuration cfg{n, a, b};
        const StepDecomposition d = step_decomposed(cfg, rng);
        CHECK(d.a_keep >= 0);
        CHECK(d.a_keep <= a);
        CHECK(d.b_keep >= 0);
        CHECK(d.b_keep <= b);
        CHECK(d.q_to_a + d.q_to_b + d.q_stay == cfg.q());
        const Configuration next{n, d.next_a(), d.next_b()};
        CHECK(next.valid());
        // a' <= a + q_to_a <= a + q, and from q = 0 colors cannot grow.
        CHECK(next.a <= a + d.q_to_a);
        CHECK(next.b <= b + d.q_to_b);
        // Bias bound: |s'| <= max(a, b) + q.
        CHECK(std::abs(next.s()) <= std::max(a, b) + cfg.q());
    }
}

TEST_CASE("sampled means agree with expected_next") {
    const Configuration cfg{1000, 300, 200};
    const ExpectedNext e = expected_next(cfg);
    RandomSource rng(21);
    const std::int64_t T = 100000;
    double sa = 0, sb = 0, va = 0, vb = 0;
    for (std::int64_t t = 0; t < T; ++t) {
        const Configuration next = step(cfg, rng);
        sa += static_cast<double>(next.a);
        sb += static_cast<double>(next.b);
        va += static_cast<double>(next.a) * static_cast<double>(next.a);
        vb += static_cast<double>(next.b) * static_cast<double>(next.b);
    }
    const double ma = sa / T, mb = sb / T;
    const double sea = std::sqrt((va / T - ma * ma) / T);
    const double seb = std::sqrt((vb / T - mb * mb) / T);
    CHECK(std::abs(ma - e.ea) <= 4 * sea);
    CHECK(std::abs(mb - e.eb) <= 4 * seb);
}

TEST_CASE("default horizon and outcome names") {
    CHECK(default_max_rounds(1000) == static_cast<std::int64_t>(std::ceil(100 * std::log(1000.0))));
    CHECK(std::string(outcome_name(Outcome::AbsorbedAlpha)) == "absorbed-alpha");
    CHECK(std::string(outcome_name(Outcome::Timeout)) == "timeout");
}

TEST_CASE("invalid configurations are rejected") {
    RandomSource rng(0);
    CHECK_THROWS_AS(step({10, 8, 8}, rng), std::invalid_argument);
    CHECK_THROWS_AS(expected_next({0, 0, 0}), std::invalid_argument);
}
