#pragma once

#include <cstdint>

namespace codedmm {

/// User-facing parameters of a coded multiplication scheme.
///
/// Workers store a 1/k_a fraction of A and a 1/k_b fraction of B.  The
/// relaxation x trades straggler resilience for lighter coded blocks:
/// the scheme tolerates s = s_max - x full stragglers.
struct SchemeParams {
    long long n = 0;    ///< worker count
    long long k_a = 0;  ///< inverse storage fraction for A
    long long k_b = 0;  ///< inverse storage fraction for B (1 = matrix-vector)
    long long x = 0;    ///< straggler-resilience relaxation
    std::uint64_t seed = 0;
};

/// Every scalar quantity derived from SchemeParams.
struct DerivedParams {
    long long n = 0;
    long long k_a = 0;
    long long k_b = 0;
    long long x = 0;

    long long max_stragglers = 0;    ///< s_max = n - k_a*k_b
    long long stragglers = 0;        ///< s = s_max - x, the resilience target
    long long weight_reduction = 0;  ///< y = floor(k_a*x / s_max)
    long long num_a_blocks = 0;      ///< block-columns of A = lcm(n, k_a)
    long long num_b_blocks = 0;      ///< block-columns of B = k_b
    long long num_unknowns = 0;      ///< total block products to recover
    long long uncoded_per_worker = 0;  ///< p = num_unknowns / n
    long long tasks_per_worker = 0;    ///< ell = num_a_blocks / k_a
    long long coded_per_worker = 0;    ///< ell_c = ell - p
    long long num_groups = 0;          ///< c = n / ell = gcd(n, k_a)
    long long type_window = 0;         ///< omega = 1 + ceil(s_max / k_b)
    long long b_weight = 0;            ///< zeta = 1 + k_b - ceil(k_b / omega)
    long long recovery_threshold = 0;  ///< tau = k_a*k_b + x
    long long appearances = 0;         ///< sigma = k_b + s_max, per A block

    /// Weight of each coded A block.
    long long a_weight() const { return k_a - weight_reduction; }
};

/// Validates params and derives all scheme quantities.
///
/// Throws std::invalid_argument when n <= k_a*k_b (no straggler margin),
/// when x is outside [0, s_max - 1] (degenerate relaxation), or when a
/// parameter exceeds the supported range.
DerivedParams derive_params(const SchemeParams& params);

} // namespace codedmm
