#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "udyn/config.hpp"
#include "udyn/dynamics.hpp"
#include "udyn/phase.hpp"
#include "udyn/random.hpp"
#include "udyn/stats.hpp"

namespace udyn {

enum class ClaimId {
    QLowerBound,
    AIncrease,
    InformationSpreading,
    SIncrease,
    BDecrease,
    SPreserved,
    QPreserved,
    QDecrease,
    AWins,
    SDoesNotDecrease,
    QBounded,
    ApxMinBias,
};

struct ClaimParams {
    double gamma = 1.0;
    double epsilon = 0.5;  // slack in the bias-preservation bounds
    double horizon_factor = 20.0;  // rounds = ceil(horizon_factor * ln n) for horizon claims
};

// One-step (or bounded-horizon) validator for a single claim: a precondition
// on the starting configuration and a per-trial pass predicate.
struct ClaimSpec {
    ClaimId id;
    std::string name;
    bool horizon = false;      // bounded-horizon claim (vs one-step)
    bool exp_small = false;    // failure probability e^{-Theta(n)}: expect zero failures
    bool whp = true;           // subject to the pass_rate >= 0.99 acceptance threshold
    std::function<bool(const Configuration&, const ClaimParams&)> precondition;
    std::function<bool(const Configuration&, const ClaimParams&, RandomSource&)> trial;
};

const std::vector<ClaimSpec>& claim_registry();
const ClaimSpec& claim_by_id(ClaimId id);
const ClaimSpec* claim_by_name(const std::string& name);

// Canonical precondition-satisfying starting configuration at size n, used by
// the CLI and the acceptance suite.
Configuration default_claim_config(ClaimId id, std::int64_t n, const ClaimParams& params);

struct ExperimentReport {
    std::string id;
    std::int64_t n = 0;
    std::int64_t trials = 0;
    std::int64_t pass_count = 0;
    double pass_rate = 0;
    Interval confidence;  // 99% Wilson
    std::uint64_t seed = 0;
    double wall_ms = 0;
};

ExperimentReport validate_claim(const ClaimSpec& spec, const Configuration& cfg,
                                std::int64_t trials, RandomSource& rng,
                                const ClaimParams& params, int workers = 0);

struct HittingTimes {
    std::vector<std::int64_t> rounds;  // per-trial first round with |s| >= sqrt(n ln n)
    std::int64_t timeouts = 0;
    double median = 0;
    double q90 = 0;
};

// First round at which |s| reaches sqrt(n ln n), from a low-bias start.
HittingTimes symmetry_breaking_time(std::int64_t n, const Configuration& start,
                                    std::int64_t trials, RandomSource& rng,
                                    int workers = 0);

enum class StartKind { Balanced, Biased };

struct ScalingRow {
    std::int64_t n = 0;
    std::int64_t trials = 0;
    double median_rounds = 0;
    double q90_rounds = 0;
    std::int64_t monochromatic = 0;  // absorbed at a color
    std::int64_t alpha_wins = 0;
    std::int64_t timeouts = 0;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    LinearFit fit;  // median rounds vs ln n
};

ScalingResult convergence_scaling(const std::vector<std::int64_t>& n_list, StartKind kind,
                                  double gamma, std::int64_t trials, RandomSource& rng,
                                  int workers = 0);

// Starting configuration used by convergence_scaling: a = b for Balanced,
// s = ceil(2 gamma sqrt(n ln n)) with q = n/3 for Biased.
Configuration scaling_start(std::int64_t n, StartKind kind, double gamma);

struct MinorityWinResult {
    ExperimentReport report;       // pass = absorbed at the initial minority color
    std::int64_t majority_wins = 0;
    std::int64_t undecided = 0;
};

// Start at q = n/3, a = n/3 + round(sqrt n), b = n/3 - round(sqrt n) (mirrored
// when requested) and count runs absorbed at the initial minority.
MinorityWinResult minority_win_probability(std::int64_t n, std::int64_t trials,
                                           RandomSource& rng, bool minority_is_alpha = false,
                                           int workers = 0);

// Consecutive initial rounds classified H4 from s = round(n^{2/3}), q = n/3.
std::vector<std::int64_t> lower_bound_experiment(std::int64_t n, std::int64_t trials,
                                                 RandomSource& rng,
                                                 const PhaseParameters& params,
                                                 int workers = 0);

struct HypothesisEstimate {
    double h = 1.0;
    double c1_hat = 0;            // max over sampled configs of P(|S| < h sqrt n)
    double prop2_fail_rate = 0;   // max over sampled configs with s >= h sqrt n of P(|S| < (1+eps)s)
    double epsilon = 0;
    double m = 0;                 // target bias sqrt(n) log n
};

HypothesisEstimate estimate_H2_hypotheses(std::int64_t n, double h, double epsilon,
                                          std::int64_t sample_configs,
                                          std::int64_t trials_each, RandomSource& rng,
                                          double gamma = 1.0, int workers = 0);

// Parallel pass-counting over independent trials; result is independent of the
// worker count because trial i always uses rng.derived(i).
std::int64_t count_passes(std::int64_t trials, const RandomSource& base, int workers,
                          const std::function<bool(std::int64_t, RandomSource&)>& trial);

}  // namespace udyn
