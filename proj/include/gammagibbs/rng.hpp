#pragma once

#include <cstdint>
#include <random>

namespace gammagibbs {

/// Seeded pseudo-random stream. Each chain or worker owns one; child streams
/// are derived deterministically with split().
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Independent child stream, a pure function of (seed, stream, child).
    Rng split(std::uint64_t child) const;

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [a, b); never returns b.
    double uniform(double a, double b);
    /// Unit-rate exponential.
    double exponential();
    std::uint64_t poisson(double mean);
    /// Uniform index in [0, n).
    std::size_t index(std::size_t n);

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace gammagibbs
