#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace udyn {

// Counts are 64-bit; n is capped so that count/n arithmetic stays exact in
// double precision.
inline constexpr std::int64_t kMaxPopulation = std::int64_t{1} << 40;

// Macrostate of the two-color process on the complete graph. The undecided
// count q and the bias s are derived.
struct Configuration {
    std::int64_t n = 1;
    std::int64_t a = 0;
    std::int64_t b = 0;

    std::int64_t q() const { return n - a - b; }
    std::int64_t s() const { return a - b; }

    bool valid() const {
        return n >= 1 && n <= kMaxPopulation && a >= 0 && b >= 0 && a + b <= n;
    }

    bool operator==(const Configuration&) const = default;
};

inline void require_valid(const Configuration& cfg) {
    if (!cfg.valid()) {
        throw std::invalid_argument("invalid configuration (n=" + std::to_string(cfg.n) +
                                    ", a=" + std::to_string(cfg.a) +
                                    ", b=" + std::to_string(cfg.b) + ")");
    }
}

// The five per-class transfer counts realized in one round: colored nodes can
// only keep their color or go undecided, undecided nodes adopt what they pull.
struct StepDecomposition {
    std::int64_t a_keep = 0;   // Alpha staying Alpha
    std::int64_t b_keep = 0;   // Beta staying Beta
    std::int64_t q_to_a = 0;   // undecided turning Alpha
    std::int64_t q_to_b = 0;   // undecided turning Beta
    std::int64_t q_stay = 0;   // undecided staying undecided

    std::int64_t next_a() const { return a_keep + q_to_a; }
    std::int64_t next_b() const { return b_keep + q_to_b; }
};

}  // namespace udyn
