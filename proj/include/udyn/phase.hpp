#pragma once

#include <cstdint>
#include <vector>

#include "udyn/config.hpp"

namespace udyn {

// Region threshold constant gamma; thresholds use the natural logarithm.
struct PhaseParameters {
    double gamma = 1.0;
};

enum class RegionLabel {
    H1, H2, H3, H4, H5, H6, H7,
    AbsorbedAlpha, AbsorbedBeta, AbsorbedUndecided,
};

enum class MajoritySign { AlphaLeading, BetaLeading, Tied };

struct Region {
    RegionLabel label;
    MajoritySign majority_sign;
};

// Serialized labels: "H1".."H7", "ABS_A", "ABS_B", "ABS_Q".
const char* region_name(RegionLabel label);

// Partition of the (|s|, q) plane at a fixed gamma. With sigma = |s| and
// theta = gamma*sqrt(n ln n):
//   sigma <  theta:          q >= n/2 -> H1;  n/18 <= q < n/2 -> H2;  q < n/18 -> H3
//   theta <= sigma < 2n/3:   q >= n/18 -> H4;  q < n/18 -> H5
//   sigma >= 2n/3:           q <= sqrt(n ln n) and sigma <= n - 5 sqrt(n ln n) -> H7,
//                            otherwise H6
// Absorbed states map to the Absorbed* labels, checked first.
Region classify(const Configuration& cfg, const PhaseParameters& params);

struct PhaseDigraph {
    // allowed[from][to]
    bool allowed(RegionLabel from, RegionLabel to) const;
    std::vector<std::pair<RegionLabel, RegionLabel>> arrows() const;

    bool matrix[10][10] = {};
};

// Fixed arrow set reconstructed from the per-phase exit lemmas:
//   H3->{H1,H2,H4}, H1->{H2,H4}, H2->{H4}, H4->{H6}, H5->{H4,H6},
//   H7->{H4,H5,H6}, H6->{ABS_A,ABS_B}, self-loops on H1..H7 and on the
//   absorbed labels.
PhaseDigraph allowed_digraph();

struct TransitionAudit {
    std::int64_t round;  // index of the source configuration in the trajectory
    RegionLabel from;
    RegionLabel to;
    bool allowed;
};

std::vector<TransitionAudit> audit_trajectory(const std::vector<Configuration>& traj,
                                              const PhaseParameters& params);

}  // namespace udyn
