#include <cmath>

#include "doctest.h"
#include "udyn/stats.hpp"

using namespace udyn;

TEST_CASE("wilson interval basics") {
    const Interval all = wilson_interval(100, 100, kZ99);
    CHECK(all.hi == doctest::Approx(1.0));
    CHECK(all.lo > 0.9);
    const Interval none = wilson_interval(0, 100, kZ99);
    CHECK(none.lo == doctest::Approx(0.0));
    CHECK(none.hi < 0.1);
    const Interval half = wilson_interval(50, 100, kZ99);
    CHECK(half.lo < 0.5);
    CHECK(half.hi > 0.5);
    CHECK(half.lo >= 0.0);
    CHECK(half.hi <= 1.0);
    // Wider confidence -> wider interval.
    const Interval narrow = wilson_interval(50, 100, 1.96);
    CHECK(narrow.lo > half.lo);
    CHECK(narrow.hi < half.hi);
}

TEST_CASE("quantiles by linear interpolation") {
    CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == doctest::Approx(3.0));
    CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({7}, 0.9) == doctest::Approx(7.0));
    CHECK(quantile({5, 1, 3}, 0.0) == doctest::Approx(1.0));
    CHECK(quantile({5, 1, 3}, 1.0) == doctest::Approx(5.0));
}

TEST_CASE("least squares recovers an exact line") {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
        x.push_back(static_cast<double>(i));
        y.push_back(3.0 * i + 2.0);
    }
    const LinearFit fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two proportion z test") {
    // Identical proportions: p-value 1.
    CHECK(two_proportion_pvalue(50, 100, 50, 100) == doctest::Approx(1.0));
    // Extreme difference: essentially zero.
    CHECK(two_proportion_pvalue(95, 100, 5, 100) < 1e-6);
    // Mild difference: comfortably above typical thresholds.
    CHECK(two_proportion_pvalue(52, 100, 48, 100) > 0.5);
}
