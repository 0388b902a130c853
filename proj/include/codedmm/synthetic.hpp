#pragma once

#include "codedmm/linalg.hpp"
#include "codedmm/rng.hpp"

namespace codedmm {

/// Sparse matrix with i.i.d. Bernoulli(density) support and uniform(-1,1)
/// values.
SparseMatrix random_sparse(long long rows, long long cols, double density, Rng& rng);

/// Fully dense matrix with uniform(-1,1) entries.
DenseMatrix random_dense(long long rows, long long cols, Rng& rng);

} // namespace codedmm
