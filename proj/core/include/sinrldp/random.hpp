#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sinrldp {

/// Derives an independent child seed from `master` for a labelled stream.
/// Pure function of its arguments; the basis of every reproducibility guarantee.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

/// Seeded generator with platform-independent variate algorithms.
///
/// The standard library's distributions are implementation-defined, so uniform, exponential
/// and Poisson variates are computed here from the raw 64-bit engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1).
    double uniform_open();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential(double rate);
    std::uint64_t poisson(double mean);
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace sinrldp
