#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "udyn/chain.hpp"
#include "udyn/dynamics.hpp"

using namespace udyn;

TEST_CASE("state space indexing round-trips") {
    const StateSpace space(7);
    CHECK(space.size() == 36);  // (n+1)(n+2)/2
    for (std::int64_t a = 0; a <= 7; ++a) {
        for (std::int64_t b = 0; a + b <= 7; ++b) {
            const std::int64_t idx = space.index(a, b);
            REQUIRE(idx >= 0);
            REQUIRE(idx < space.size());
            const Configuration c = space.config(idx);
            CHECK(c.a == a);
            CHECK(c.b == b);
        }
    }
}

TEST_CASE("one-step distribution golden rows") {
    const StateSpace s2(2);
    const std::vector<double> row = one_step_distribution({2, 1, 1});
    CHECK(row[static_cast<std::size_t>(s2.index(1, 1))] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(row[static_cast<std::size_t>(s2.index(1, 0))] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(row[static_cast<std::size_t>(s2.index(0, 1))] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(row[static_cast<std::size_t>(s2.index(0, 0))] == doctest::Approx(0.25).epsilon(1e-12));

    const StateSpace s3(3);
    const std::vector<double> row3 = one_step_distribution({3, 1, 1});
    CHECK(row3[static_cast<std::size_t>(s3.index(0, 0))] ==
          doctest::Approx(1.0 / 27.0).epsilon(1e-12));

    const StateSpace s5(5);
    const std::vector<double> row5 = one_step_distribution({5, 5, 0});
    CHECK(row5[static_cast<std::size_t>(s5.index(5, 0))] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rows sum to 1 and match the expectation formulas at n=12") {
    const std::int64_t n = 12;
    const StateSpace space(n);
    for (std::int64_t idx = 0; idx < space.size(); ++idx) {
        const Configuration cfg = space.config(idx);
        const std::vector<double> row = one_step_distribution(cfg);
        double sum = 0, ea = 0, eb = 0;
        for (std::int64_t j = 0; j < space.size(); ++j) {
            const Configuration to = space.config(j);
            sum += row[static_cast<std::size_t>(j)];
            ea += row[static_cast<std::size_t>(j)] * static_cast<double>(to.a);
            eb += row[static_cast<std::size_t>(j)] * static_cast<double>(to.b);
        }
        const ExpectedNext e = expected_next(cfg);
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        CHECK(std::abs(ea - e.ea) <= 1e-9);
        CHECK(std::abs(eb - e.eb) <= 1e-9);
    }
}

TEST_CASE("color-swap equivariance of the kernel") {
    const std::int64_t n = 12;
    const StateSpace space(n);
    for (std::int64_t a = 0; a <= n; ++a) {
        for (std::int64_t b = 0; a + b <= n; ++b) {
            const std::vector<double> row = one_step_distribution({n, a, b});
            const std::vector<double> mirror = one_step_distribution({n, b, a});
            for (std::int64_t j = 0; j < space.size(); ++j) {
                const Configuration to = space.config(j);
                const double p = row[static_cast<std::size_t>(j)];
                const double pm = mirror[static_cast<std::size_t>(space.index(to.b, to.a))];
                CHECK(p == doctest::Approx(pm).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("build_kernel structure") {
    const TransitionKernel k2 = build_kernel(2, KernelKind::Plain);
    CHECK(k2.states().size() == 6);
    const std::vector<double>& row = k2.rows[static_cast<std::size_t>(k2.states().index(1, 1))];
    CHECK(row[static_cast<std::size_t>(k2.states().index(0, 0))] ==
          doctest::Approx(0.25).epsilon(1e-12));

    const TransitionKernel k1 = build_kernel(1, KernelKind::Plain);
    CHECK(k1.states().size() == 3);
    for (std::int64_t idx = 0; idx < 3; ++idx) {
        CHECK(k1.rows[static_cast<std::size_t>(idx)][static_cast<std::size_t>(idx)] ==
              doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(build_kernel(61, KernelKind::Plain), std::invalid_argument);
}

TEST_CASE("absorption from trivial and symmetric starts") {
    const TransitionKernel k = build_kernel(12, KernelKind::Plain);
    AbsorptionReport r = absorption(k, {12, 12, 0});
    CHECK(r.p_alpha == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.expected_rounds == doctest::Approx(0.0).epsilon(1e-10));

    r = absorption(k, {12, 4, 4});
    CHECK(std::abs(r.p_alpha - r.p_beta) <= 1e-10);
    CHECK(std::abs(r.p_alpha + r.p_beta + r.p_undecided - 1.0) <= 1e-8);
    CHECK(r.expected_rounds > 0);
}

TEST_CASE("pruned kernel equals plain kernel outside H2") {
    const PhaseParameters p{1.0};
    // q = 1 < n/18 is H3 at zero bias.
    const Configuration outside{36, 18, 17};
    const std::vector<double> plain = one_step_distribution(outside);
    const std::vector<double> pruned = pruned_one_step_distribution(outside, p);
    REQUIRE(plain.size() == pruned.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
        CHECK(plain[i] == doctest::Approx(pruned[i]).epsilon(1e-15));
    }
    CHECK_THROWS_AS(pruned_one_step_distribution({35, 17, 17}, p), std::invalid_argument);
}

TEST_CASE("pruned kernel redirects H2 exits and keeps the bias marginal") {
    const PhaseParameters p{1.0};
    const std::int64_t n = 36;
    const StateSpace space(n);
    const Configuration h2{36, 11, 9};  // q = 16, s = 2: inside H2 (q = n/2 would tie-break to H1)
    const std::vector<double> plain = one_step_distribution(h2);
    const std::vector<double> pruned = pruned_one_step_distribution(h2, p);

    double pruned_sum = 0;
    std::map<std::int64_t, double> plain_marginal, pruned_marginal;
    for (std::int64_t j = 0; j < space.size(); ++j) {
        const Configuration to = space.config(j);
        const double pp = pruned[static_cast<std::size_t>(j)];
        pruned_sum += pp;
        if (to.q() < n / 18 || to.q() > n / 2) CHECK(pp == 0.0);
        plain_marginal[to.s()] += plain[static_cast<std::size_t>(j)];
        pruned_marginal[to.s()] += pp;
    }
    CHECK(std::abs(pruned_sum - 1.0) <= 1e-9);
    for (const auto& [s, mass] : plain_marginal) {
        CHECK(std::abs(mass - pruned_marginal[s]) <= 1e-12);
    }
}

TEST_CASE("kernel CSV export emits parseable nonzero entries") {
    const TransitionKernel k = build_kernel(3, KernelKind::Plain);
    std::ostringstream os;
    export_kernel_csv(k, os);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "a,b,a_next,b_next,prob");
    std::string line;
    double total_11 = 0;
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        std::int64_t a, b, an, bn;
        double prob;
        char comma;
        std::istringstream ls(line);
        ls >> a >> comma >> b >> comma >> an >> comma >> bn >> comma >> prob;
        REQUIRE(ls);
        CHECK(prob > 0);
        CHECK(prob <= 1.0);
        if (a == 1 && b == 1) total_11 += prob;
    }
    CHECK(rows > 10);
    CHECK(total_11 == doctest::Approx(1.0).epsilon(1e-12));
}
