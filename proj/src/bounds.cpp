#include "udyn/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace udyn {

double chernoff_mult_log(double mu, double delta, TailDirection direction) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("chernoff_mult: delta must be in (0,1)");
    }
    if (!(mu > 0.0)) throw std::invalid_argument("chernoff_mult: mu must be positive");
    const double div = direction == TailDirection::Upper ? 3.0 : 2.0;
    return -mu * delta * delta / div;
}

double chernoff_mult(double mu, double delta, TailDirection direction) {
    return std::exp(chernoff_mult_log(mu, delta, direction));
}

double chernoff_add_log(std::int64_t n, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("chernoff_add: lambda must be positive");
    if (n < 1) throw std::invalid_argument("chernoff_add: n must be >= 1");
    return -2.0 * lambda * lambda / static_cast<double>(n);
}

double chernoff_add(std::int64_t n, double lambda) {
    return std::exp(chernoff_add_log(n, lambda));
}

double reverse_chernoff_log(double mu, double delta, std::int64_t n) {
    if (!(delta > 0.0 && delta <= 0.5)) {
        throw std::invalid_argument("reverse_chernoff: delta must be in (0, 1/2]");
    }
    if (!(mu <= static_cast<double>(n) / 2.0)) {
        throw std::invalid_argument("reverse_chernoff: requires mu <= n/2 (mu=" +
                                    std::to_string(mu) + ", n=" + std::to_string(n) + ")");
    }
    if (!(delta * delta * mu >= 3.0)) {
        throw std::invalid_argument("reverse_chernoff: requires delta^2*mu >= 3 (got " +
                                    std::to_string(delta * delta * mu) + ")");
    }
    return -9.0 * delta * delta * mu;
}

double reverse_chernoff(double mu, double delta, std::int64_t n) {
    return std::exp(reverse_chernoff_log(mu, delta, n));
}

TailCheck empirical_tail_check(const TailQuery& q, double bound, bool reverse,
                               std::int64_t trials, RandomSource& rng) {
    if (!q.valid()) throw std::invalid_argument("empirical_tail_check: invalid query");
    if (trials < 1) throw std::invalid_argument("empirical_tail_check: trials must be >= 1");

    std::int64_t hits = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        const std::int64_t x = rng.binomial(q.n, q.p);
        const bool in_tail = q.direction == TailDirection::Upper
                                 ? static_cast<double>(x) >= q.threshold
                                 : static_cast<double>(x) <= q.threshold;
        if (in_tail) ++hits;
    }
    TailCheck c;
    c.empirical = static_cast<double>(hits) / static_cast<double>(trials);
    c.std_error = std::sqrt(c.empirical * (1.0 - c.empirical) / static_cast<double>(trials));
    c.bound = bound;
    c.consistent = reverse ? c.empirical >= bound - 3.0 * c.std_error
                           : c.empirical <= bound + 3.0 * c.std_error;
    return c;
}

}  // namespace udyn
