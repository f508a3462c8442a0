#pragma once

#include <vector>

#include "udyn/config.hpp"
#include "udyn/random.hpp"

namespace udyn {

struct ExpectedNext {
    double ea = 0;
    double eb = 0;
    double eq = 0;
    double es = 0;
};

// Closed-form one-round expectations on the complete graph (each node pulls
// uniformly among all n nodes, itself included):
//   E[A] = a(a+2q)/n,  E[B] = b(b+2q)/n,  E[Q] = (q^2+2ab)/n,
//   E[S] = E[A]-E[B] = s(1+q/n).
ExpectedNext expected_next(const Configuration& cfg);

// One synchronous round, sampled exactly at the class level:
//   a_keep ~ Bin(a, (a+q)/n), b_keep ~ Bin(b, (b+q)/n),
//   (q_to_a, q_to_b, q_stay) ~ Multinomial(q; a/n, b/n, q/n),
// with the two binomials and the multinomial triple mutually independent.
StepDecomposition step_decomposed(const Configuration& cfg, RandomSource& rng);

Configuration step(const Configuration& cfg, RandomSource& rng);

// True iff a = n, b = n or q = n.
bool is_absorbing(const Configuration& cfg);

enum class Outcome { AbsorbedAlpha, AbsorbedBeta, AbsorbedUndecided, Timeout };

const char* outcome_name(Outcome o);

struct RunResult {
    std::vector<Configuration> trajectory;  // starts at the initial configuration
    Outcome outcome = Outcome::Timeout;
    std::int64_t rounds() const { return static_cast<std::int64_t>(trajectory.size()) - 1; }
};

std::int64_t default_max_rounds(std::int64_t n);

RunResult run_until_absorbed(const Configuration& cfg, RandomSource& rng,
                             std::int64_t max_rounds);

// Same loop without storing the trajectory; returns (outcome, rounds).
struct RunSummary {
    Outcome outcome = Outcome::Timeout;
    std::int64_t rounds = 0;
    Configuration final;
};

RunSummary run_until_absorbed_summary(const Configuration& cfg, RandomSource& rng,
                                      std::int64_t max_rounds);

}  // namespace udyn
