#pragma once

#include <cstdint>
#include <random>

namespace codedmm {

/// Seedable PRNG producing platform-independent uniform doubles.
///
/// std::mt19937_64 output is fully specified by the standard; the mapping to
/// doubles below avoids std::uniform_real_distribution, whose draw sequence
/// is implementation-defined. Identical seeds therefore yield bit-identical
/// coefficient streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [-1, 1).
    double uniform_sym() { return 2.0 * uniform01() - 1.0; }

private:
    std::mt19937_64 engine_;
};

} // namespace codedmm
