#pragma once

#include <cstdint>
#include <random>

namespace zerocast {

// splitmix64 finalizer, used to decorrelate derived seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * @brief Seed splitting rule for independent sub-streams.
 *
 * Every component that needs its own random stream derives it as
 * derive_seed(base_seed, stream_index); the same (base, index) pair always
 * yields the same stream, and distinct indices give decorrelated streams.
 * Stream indices are assigned per use site (one per series, per run, per
 * parameter block) and never reused within a run.
 */
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

/**
 * @brief Random stream owning the samplers used across the library.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    // Independent stream derived from this stream's seed.
    Rng substream(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

    std::uint64_t seed() const { return seed_; }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    // Inclusive on both ends.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }

    bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

    double gamma(double shape, double scale) {
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }

    std::int64_t poisson(double mean) {
        return std::poisson_distribution<std::int64_t>(mean)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace zerocast
