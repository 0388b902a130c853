#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace codedmm {

using DenseMatrix = Eigen::MatrixXd;

/// Compressed-column sparse matrix.
///
/// Row indices are strictly increasing within each column and explicit
/// zeros are dropped on construction; both invariants are relied on by the
/// product kernels.  Immutable after construction.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(long long rows, long long cols);  // all-zero

    struct Triplet {
        long long row;
        long long col;
        double value;
    };

    static SparseMatrix from_triplets(long long rows, long long cols,
                                      std::vector<Triplet> triplets);
    static SparseMatrix from_dense(const DenseMatrix& dense);

    long long rows() const { return rows_; }
    long long cols() const { return cols_; }
    long long nnz() const { return static_cast<long long>(values_.size()); }
    double density() const {
        return rows_ * cols_ == 0 ? 0.0
                                  : static_cast<double>(nnz()) / static_cast<double>(rows_ * cols_);
    }

    std::span<const long long> col_ptr() const { return col_ptr_; }
    std::span<const long long> row_idx() const { return row_idx_; }
    std::span<const double> values() const { return values_; }

    DenseMatrix to_dense() const;

    /// Copies columns [first, first+count) into a new matrix.
    SparseMatrix column_slice(long long first, long long count) const;

private:
    long long rows_ = 0;
    long long cols_ = 0;
    std::vector<long long> col_ptr_{0};
    std::vector<long long> row_idx_;
    std::vector<double> values_;
};

/// coefficients[i] * blocks[i] summed; all blocks must share dimensions.
SparseMatrix linear_combination(std::span<const SparseMatrix* const> blocks,
                                std::span<const double> coefficients);

/// A matrix split into equal-width block-columns.
class PartitionedMatrix {
public:
    /// Splits into `blocks` column blocks.  If the column count is not
    /// divisible, throws unless `pad` is set, in which case zero columns
    /// are appended and tracked in padded_cols().
    PartitionedMatrix(SparseMatrix matrix, long long blocks, bool pad = false);
    PartitionedMatrix(const DenseMatrix& matrix, long long blocks, bool pad = false);

    long long rows() const { return rows_; }
    long long cols() const { return cols_; }          ///< original column count
    long long padded_cols() const { return padded_cols_; }
    long long block_count() const { return static_cast<long long>(blocks_.size()); }
    long long block_width() const { return block_width_; }

    const SparseMatrix& block(long long i) const { return *blocks_.at(i); }
    std::shared_ptr<const SparseMatrix> block_ptr(long long i) const { return blocks_.at(i); }

private:
    void split(const SparseMatrix& matrix, long long blocks, bool pad);

    long long rows_ = 0;
    long long cols_ = 0;
    long long padded_cols_ = 0;
    long long block_width_ = 0;
    std::vector<std::shared_ptr<const SparseMatrix>> blocks_;
};

struct GramProduct {
    DenseMatrix value;
    std::uint64_t flops = 0;  ///< 2 * multiply-add count
};

/// Computes Ai^T * Bj for two blocks with equal row counts, accumulating
/// per output column with a dense scratch row.  The flop count feeds the
/// simulator cost models.
GramProduct gram_product(const SparseMatrix& ai, const SparseMatrix& bj);

/// Dense reference path for the same product.
DenseMatrix gram_product(const DenseMatrix& ai, const DenseMatrix& bj);

/// Default relative tolerance for numerical rank decisions.
double default_rank_tol(const DenseMatrix& m);

/// Count of singular values above rel_tol * sigma_max.
/// Pass rel_tol <= 0 to use default_rank_tol.
long long numerical_rank(const DenseMatrix& m, double rel_tol = -1.0);

/// sigma_max / sigma_min with sigma_min taken over the smaller dimension;
/// +infinity when sigma_min underflows.
double condition_number(const DenseMatrix& m);

struct LeastSquaresSolution {
    DenseMatrix solution;
    double residual_norm = 0.0;  ///< Frobenius norm of M*X - rhs
};

/// Minimum-residual solve of M * X = rhs via a rank-revealing column-pivoted
/// orthogonal factorization.  Throws std::invalid_argument when M is
/// numerically rank-deficient (rank < cols).
LeastSquaresSolution solve_least_squares(const DenseMatrix& m, const DenseMatrix& rhs);

/// Column-wise Kronecker product: column j of the result is
/// kron(ga.col(j), gb.col(j)).  ga and gb must have equal column counts.
DenseMatrix khatri_rao_columns(const DenseMatrix& ga, const DenseMatrix& gb);

} // namespace codedmm
