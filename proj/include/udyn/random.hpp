#pragma once

#include <cstdint>
#include <random>

namespace udyn {

// Seeded random source with an explicit sub-stream id so that parallel trials
// can each draw from an independent, reproducible sequence. Identical
// (seed, stream) pairs yield identical draw sequences.
class RandomSource {
  public:
    explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // Independent source for sub-trial i of this stream.
    RandomSource derived(std::uint64_t i) const {
        return RandomSource(seed_, mix(stream_, i + 1));
    }

    std::mt19937_64& engine() { return engine_; }

    std::int64_t binomial(std::int64_t trials, double p) {
        if (trials <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return trials;
        std::binomial_distribution<std::int64_t> dist(trials, p);
        return dist(engine_);
    }

    double uniform() {
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        return dist(engine_);
    }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uniform_int_distribution<std::int64_t> dist(lo, hi);
        return dist(engine_);
    }

  private:
    // splitmix64 finalizer, applied twice to decorrelate seed and stream.
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        return splitmix(splitmix(seed) ^ splitmix(stream * 0xda942042e4dd58b5ULL + 1));
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace udyn
