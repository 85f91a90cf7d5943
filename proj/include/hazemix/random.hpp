#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hazemix {

/// Seeded generator with platform-independent derived draws. The standard
/// distributions are implementation-defined, so uniform reals are built from
/// the raw 64-bit engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard exponential, i.e. Gamma(1, 1).
    double exponential();

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

/// Stable substream seed for (run seed, pair id, sample index); independent of
/// processing order.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view id, std::uint64_t index);

}  // namespace hazemix
