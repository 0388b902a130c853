#pragma once

#include "codedmm/linalg.hpp"

#include <utility>
#include <vector>

namespace codedmm {

/// Polynomial-code comparison scheme: one dense-coded product per worker,
/// recovery threshold k_a*k_b, decoding by interpolation at the workers'
/// evaluation points.
struct PolyCodePlan {
    long long n = 0;
    long long k_a = 0;
    long long k_b = 0;
    std::vector<double> points;  ///< pairwise distinct evaluation points

    long long recovery_threshold() const { return k_a * k_b; }

    /// Coefficients of worker i's encoded A block: weight k_a, entry j is
    /// points[i]^j.
    std::vector<double> a_coefficients(long long worker) const;
    /// Coefficients of worker i's encoded B block: weight k_b, entry j is
    /// points[i]^(j*k_a).
    std::vector<double> b_coefficients(long long worker) const;
};

/// Builds the plan; default points are 1..n.  Throws on duplicate points or
/// n <= k_a*k_b.
PolyCodePlan poly_plan(long long n, long long k_a, long long k_b,
                       std::vector<double> points = {});

struct PolyPayload {
    SparseMatrix a;  ///< weight-k_a combination, width r/k_a
    SparseMatrix b;  ///< weight-k_b combination, width w/k_b
};

/// Materializes per-worker encoded blocks.  A must be partitioned into k_a
/// blocks and B into k_b.
std::vector<PolyPayload> poly_encode(const PartitionedMatrix& a, const PartitionedMatrix& b,
                                     const PolyCodePlan& plan);

/// Recovers A^T B from at least recovery_threshold survivor products by a
/// least-squares interpolation over all of them.  Throws when fewer are
/// given.
DenseMatrix poly_decode(const PolyCodePlan& plan,
                        const std::vector<std::pair<long long, DenseMatrix>>& survivor_products);

/// Worst condition number of the interpolation system over all straggler
/// subsets of size s (enumerated up to max_subsets, sampled beyond).
double poly_kappa_worst(const PolyCodePlan& plan, long long s, long long max_subsets = 100000);

} // namespace codedmm
