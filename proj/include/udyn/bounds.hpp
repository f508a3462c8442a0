#pragma once

#include <cstdint>

#include "udyn/random.hpp"

namespace udyn {

enum class TailDirection { Upper, Lower };

// Multiplicative Chernoff bound on P(X >= (1+delta)mu) resp.
// P(X <= (1-delta)mu), for 0 < delta < 1.
double chernoff_mult(double mu, double delta, TailDirection direction);

// Additive form: P(X >= mu + lambda) and P(X <= mu - lambda) <= exp(-2 lambda^2 / n).
double chernoff_add(std::int64_t n, double lambda);

// Reverse bound: a LOWER bound exp(-9 delta^2 mu) on both tails
// P(X >= (1+delta)mu) and P(X <= (1-delta)mu), valid for
// 0 < delta <= 1/2, mu <= n/2 and delta^2 mu >= 3.
double reverse_chernoff(double mu, double delta, std::int64_t n);

// Log-space values for reports when the bound underflows.
double chernoff_mult_log(double mu, double delta, TailDirection direction);
double chernoff_add_log(std::int64_t n, double lambda);
double reverse_chernoff_log(double mu, double delta, std::int64_t n);

struct TailQuery {
    std::int64_t n = 1;
    double p = 0.5;
    TailDirection direction = TailDirection::Upper;
    double threshold = 0;  // empirical tail at X >= threshold (upper) or X <= threshold (lower)

    bool valid() const { return n >= 1 && p >= 0.0 && p <= 1.0; }
};

struct TailCheck {
    double empirical = 0;
    double std_error = 0;
    double bound = 0;
    bool consistent = false;
};

// Samples Binomial(n, p) `trials` times and compares the empirical tail with
// `bound`: forward bounds must dominate (empirical <= bound + 3 SE), the
// reverse bound must under-cut (empirical >= bound - 3 SE).
TailCheck empirical_tail_check(const TailQuery& q, double bound, bool reverse,
                               std::int64_t trials, RandomSource& rng);

}  // namespace udyn
