#pragma once

#include <cstdint>
#include <vector>

namespace udyn {

struct Interval {
    double lo = 0;
    double hi = 1;
};

// Two-sided Wilson score interval for a binomial proportion.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z);

inline constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile

// Quantile of a sample by linear interpolation (sorts a copy).
double quantile(std::vector<double> values, double p);

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// Two-proportion z-test, two-sided p-value.
double two_proportion_pvalue(std::int64_t k1, std::int64_t n1, std::int64_t k2,
                             std::int64_t n2);

}  // namespace udyn
