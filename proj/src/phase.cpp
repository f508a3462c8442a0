#include "udyn/phase.hpp"

#include <cmath>
#include <stdexcept>

namespace udyn {

const char* region_name(RegionLabel label) {
    switch (label) {
        case RegionLabel::H1: return "H1";
        case RegionLabel::H2: return "H2";
        case RegionLabel::H3: return "H3";
        case RegionLabel::H4: return "H4";
        case RegionLabel::H5: return "H5";
        case RegionLabel::H6: return "H6";
        case RegionLabel::H7: return "H7";
        case RegionLabel::AbsorbedAlpha: return "ABS_A";
        case RegionLabel::AbsorbedBeta: return "ABS_B";
        case RegionLabel::AbsorbedUndecided: return "ABS_Q";
    }
    return "?";
}

Region classify(const Configuration& cfg, const PhaseParameters& params) {
    require_valid(cfg);
    if (params.gamma <= 0) throw std::invalid_argument("gamma must be positive");

    const std::int64_t n = cfg.n;
    const std::int64_t s = cfg.s();
    const std::int64_t q = cfg.q();
    const MajoritySign sign = s > 0   ? MajoritySign::AlphaLeading
                              : s < 0 ? MajoritySign::BetaLeading
                                      : MajoritySign::Tied;

    if (cfg.a == n) return {RegionLabel::AbsorbedAlpha, sign};
    if (cfg.b == n) return {RegionLabel::AbsorbedBeta, sign};
    if (q == n) return {RegionLabel::AbsorbedUndecided, sign};

    const double sigma = static_cast<double>(std::llabs(s));
    const double root = std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
    const double theta = params.gamma * root;

    // Boundary tie-breaks: sigma exactly at theta goes to the high-bias group,
    // q exactly at n/2 goes to H1, q exactly at n/18 goes to the larger-q
    // region, the H7 carve-out is evaluated before H6.
    if (sigma < theta) {
        if (2 * q >= n) return {RegionLabel::H1, sign};
        if (18 * q >= n) return {RegionLabel::H2, sign};
        return {RegionLabel::H3, sign};
    }
    if (3 * sigma < 2 * static_cast<double>(n)) {
        if (18 * q >= n) return {RegionLabel::H4, sign};
        return {RegionLabel::H5, sign};
    }
    if (static_cast<double>(q) <= root && sigma <= static_cast<double>(n) - 5.0 * root) {
        return {RegionLabel::H7, sign};
    }
    return {RegionLabel::H6, sign};
}

PhaseDigraph allowed_digraph() {
    using L = RegionLabel;
    PhaseDigraph g;
    auto add = [&g](L from, L to) { g.matrix[static_cast<int>(from)][static_cast<int>(to)] = true; };
    for (L h : {L::H1, L::H2, L::H3, L::H4, L::H5, L::H6, L::H7, L::AbsorbedAlpha,
                L::AbsorbedBeta, L::AbsorbedUndecided}) {
        add(h, h);
    }
    add(L::H3, L::H1);
    add(L::H3, L::H2);
    add(L::H3, L::H4);
    add(L::H1, L::H2);
    add(L::H1, L::H4);
    add(L::H2, L::H4);
    add(L::H4, L::H6);
    add(L::H5, L::H4);
    add(L::H5, L::H6);
    add(L::H7, L::H4);
    add(L::H7, L::H5);
    add(L::H7, L::H6);
    add(L::H6, L::AbsorbedAlpha);
    add(L::H6, L::AbsorbedBeta);
    return g;
}

bool PhaseDigraph::allowed(RegionLabel from, RegionLabel to) const {
    return matrix[static_cast<int>(from)][static_cast<int>(to)];
}

std::vector<std::pair<RegionLabel, RegionLabel>> PhaseDigraph::arrows() const {
    std::vector<std::pair<RegionLabel, RegionLabel>> out;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            if (matrix[i][j]) out.emplace_back(static_cast<RegionLabel>(i), static_cast<RegionLabel>(j));
        }
    }
    return out;
}

std::vector<TransitionAudit> audit_trajectory(const std::vector<Configuration>& traj,
                                              const PhaseParameters& params) {
    if (traj.empty()) throw std::invalid_argument("empty trajectory");
    const PhaseDigraph g = allowed_digraph();
    std::vector<TransitionAudit> out;
    out.reserve(traj.size() > 0 ? traj.size() - 1 : 0);
    RegionLabel prev = classify(traj.front(), params).label;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const RegionLabel cur = classify(traj[i], params).label;
        out.push_back({static_cast<std::int64_t>(i - 1), prev, cur, g.allowed(prev, cur)});
        prev = cur;
    }
    return out;
}

}  // namespace udyn
