#include "udyn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace udyn {

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2 * n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, (center - half) / denom), std::min(1.0, (center + half) / denom)};
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1 - frac) + values[lo + 1] * frac;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least_squares: need >= 2 paired points");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    LinearFit f;
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    const double cov = sxy - sx * sy / n;
    f.slope = cov / vx;
    f.intercept = (sy - f.slope * sx) / n;
    f.r_squared = vy > 0 ? (cov * cov) / (vx * vy) : 1.0;
    return f;
}

double two_proportion_pvalue(std::int64_t k1, std::int64_t n1, std::int64_t k2,
                             std::int64_t n2) {
    const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pooled * (1 - pooled) *
                                (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    if (se == 0.0) return 1.0;
    const double z = std::fabs(p1 - p2) / se;
    return std::erfc(z / std::sqrt(2.0));
}

}  // namespace udyn
