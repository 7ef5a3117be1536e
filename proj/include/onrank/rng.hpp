#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace onrank {

/// Reproducible random stream keyed by (seed, stream id).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the four
/// 32-bit halves of (seed, stream). Both algorithms are fully specified by
/// the C++ standard, and every conversion to doubles or bounded integers
/// below is done here rather than through <random> distributions (whose
/// algorithms are implementation-defined), so draw sequences match across
/// standard libraries and platforms. Changing any of this changes every
/// recorded experiment: kGeneratorVersion tags the scheme in result files.
class RngStream {
public:
    static constexpr int kGeneratorVersion = 1;

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1) at 52-bit resolution: the extremes are 2^-53 and
    /// 1 - 2^-53, both exactly representable.
    double uniform_open() { return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52; }
    /// Uniform on [0, bound), bound > 0 (Lemire's nearly-divisionless method).
    std::uint64_t uniform_index(std::uint64_t bound);
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace onrank
