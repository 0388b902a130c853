#pragma once

#include "codedmm/encoding.hpp"
#include "codedmm/linalg.hpp"

#include <vector>

namespace codedmm {

/// The k_b x n coefficient matrix of the B-side encoding.  Column i holds
/// the worker-i combination: b_weight nonzeros at cyclically consecutive
/// positions starting at i mod k_b.
struct BGenerator {
    DenseMatrix coefficients;
    long long b_weight = 0;
};

BGenerator build_GB(const EncodingPlan& plan);

/// Per-class decoding system.  Column j of g_a is the class coefficient
/// vector of worker j: an indicator for an uncoded appearance of the
/// pos-th class member, or the coded coefficients.  g is the column-wise
/// Kronecker product g_a (*) g_b; its row alpha*k_b + beta corresponds to
/// the unknown A_{alpha*ell + m}^T B_beta.
struct ClassSystem {
    long long class_id = 0;
    DenseMatrix g_a;  ///< k_a x n
    DenseMatrix g_b;  ///< k_b x n
    DenseMatrix g;    ///< k_a*k_b x n
};

ClassSystem build_class_system(const EncodingPlan& plan, long long class_id);

/// The k_b x sigma matrix of B coefficients at the workers where A block i
/// appears (uncoded or coded), columns in worker-index order.  Only defined
/// for x = 0, where every block has exactly sigma appearances and the
/// worker types cover sigma consecutive residues.
struct RiMatrix {
    long long block = 0;
    DenseMatrix coefficients;
    std::vector<long long> workers;
    long long start_type = 0;  ///< first residue of the consecutive type run
};

/// Throws std::invalid_argument when the plan has x > 0.
RiMatrix extract_Ri(const EncodingPlan& plan, long long block);

} // namespace codedmm
