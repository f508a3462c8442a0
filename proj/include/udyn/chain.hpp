#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "udyn/config.hpp"
#include "udyn/phase.hpp"

namespace udyn {

// Default cap on n for exact-kernel work; the build cost grows like n^5.
inline constexpr std::int64_t kDefaultChainCap = 60;

// Index of the macrostates (a, b) with a + b <= n, row-major in a.
class StateSpace {
  public:
    explicit StateSpace(std::int64_t n);

    std::int64_t n() const { return n_; }
    std::int64_t size() const { return size_; }
    std::int64_t index(std::int64_t a, std::int64_t b) const;
    Configuration config(std::int64_t idx) const;

  private:
    std::int64_t n_;
    std::int64_t size_;
};

enum class KernelKind { Plain, Pruned };

// Exact one-step distribution over (a', b'), as a dense vector over the
// StateSpace(n) indices. Computed by convolving the two keep-binomials with
// the multinomial over the undecided class; pmf terms are evaluated in log
// space. Throws if cfg.n exceeds `cap`.
std::vector<double> one_step_distribution(const Configuration& cfg,
                                          std::int64_t cap = kDefaultChainCap);

// Plain kernel row with the H2 exits redirected: from a configuration in H2,
// any target with q' < n/18 or q' > n/2 gets probability 0 and its mass is
// added to the canonical configuration z(s') with the same bias and q = n/2
// (or the nearest attainable q below n/2 when lattice parity or |s'| makes
// q = n/2 unreachable). The s'-marginal is identical to the plain row's.
// Requires even n.
std::vector<double> pruned_one_step_distribution(const Configuration& cfg,
                                                 const PhaseParameters& params,
                                                 std::int64_t cap = kDefaultChainCap);

struct TransitionKernel {
    std::int64_t n = 0;
    KernelKind kind = KernelKind::Plain;
    double gamma = 1.0;  // used by the pruned kind only
    std::vector<std::vector<double>> rows;

    const StateSpace& states() const { return states_; }

    explicit TransitionKernel(std::int64_t n) : n(n), states_(n) {}

  private:
    StateSpace states_;
};

TransitionKernel build_kernel(std::int64_t n, KernelKind kind, double gamma = 1.0,
                              std::int64_t cap = kDefaultChainCap);

struct AbsorptionReport {
    double p_alpha = 0;
    double p_beta = 0;
    double p_undecided = 0;
    double expected_rounds = 0;
};

// Absorption probabilities and expected absorption time from `start`, by
// direct solve of the absorbing-chain linear systems.
AbsorptionReport absorption(const TransitionKernel& kernel, const Configuration& start);

// CSV export: header row then (a, b, a_next, b_next, prob) for every nonzero
// entry, probabilities with 17 significant digits.
void export_kernel_csv(const TransitionKernel& kernel, std::ostream& os);

}  // namespace udyn
