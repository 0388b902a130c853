#include "codedmm/synthetic.hpp"

#include <stdexcept>

namespace codedmm {

SparseMatrix random_sparse(long long rows, long long cols, double density, Rng& rng) {
    if (density < 0.0 || density > 1.0) {
        throw std::invalid_argument("random_sparse: density must be in [0, 1]");
    }
    std::vector<SparseMatrix::Triplet> triplets;
    for (long long c = 0; c < cols; ++c) {
        for (long long r = 0; r < rows; ++r) {
            if (rng.uniform01() < density) {
                triplets.push_back({r, c, rng.uniform_sym()});
            }
        }
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

DenseMatrix random_dense(long long rows, long long cols, Rng& rng) {
    DenseMatrix m(rows, cols);
    for (long long c = 0; c < cols; ++c) {
        for (long long r = 0; r < rows; ++r) {
            m(r, c) = rng.uniform_sym();
        }
    }
    return m;
}

} // namespace codedmm
