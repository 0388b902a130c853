#include "codedmm/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace codedmm {

SparseMatrix::SparseMatrix(long long rows, long long cols) : rows_(rows), cols_(cols) {
    col_ptr_.assign(static_cast<std::size_t>(cols) + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(long long rows, long long cols,
                                         std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw std::invalid_argument("sparse: triplet index out of range");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });

    SparseMatrix m(rows, cols);
    m.row_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t i = 0;
    for (long long c = 0; c < cols; ++c) {
        while (i < triplets.size() && triplets[i].col == c) {
            // Duplicates within a column accumulate.
            double v = triplets[i].value;
            long long r = triplets[i].row;
            ++i;
            while (i < triplets.size() && triplets[i].col == c && triplets[i].row == r) {
                v += triplets[i].value;
                ++i;
            }
            if (v != 0.0) {
                m.row_idx_.push_back(r);
                m.values_.push_back(v);
            }
        }
        m.col_ptr_[static_cast<std::size_t>(c) + 1] = static_cast<long long>(m.values_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
    SparseMatrix m(dense.rows(), dense.cols());
    for (long long c = 0; c < dense.cols(); ++c) {
        for (long long r = 0; r < dense.rows(); ++r) {
            if (dense(r, c) != 0.0) {
                m.row_idx_.push_back(r);
                m.values_.push_back(dense(r, c));
            }
        }
        m.col_ptr_[static_cast<std::size_t>(c) + 1] = static_cast<long long>(m.values_.size());
    }
    return m;
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d = DenseMatrix::Zero(rows_, cols_);
    for (long long c = 0; c < cols_; ++c) {
        for (long long k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) {
            d(row_idx_[k], c) = values_[k];
        }
    }
    return d;
}

SparseMatrix SparseMatrix::column_slice(long long first, long long count) const {
    if (first < 0 || count < 0 || first + count > cols_) {
        throw std::invalid_argument("sparse: column slice out of range");
    }
    SparseMatrix m(rows_, count);
    const long long begin = col_ptr_[first];
    const long long end = col_ptr_[first + count];
    m.row_idx_.assign(row_idx_.begin() + begin, row_idx_.begin() + end);
    m.values_.assign(values_.begin() + begin, values_.begin() + end);
    for (long long c = 0; c <= count; ++c) {
        m.col_ptr_[c] = col_ptr_[first + c] - begin;
    }
    return m;
}

SparseMatrix linear_combination(std::span<const SparseMatrix* const> blocks,
                                std::span<const double> coefficients) {
    if (blocks.empty() || blocks.size() != coefficients.size()) {
        throw std::invalid_argument("linear_combination: size mismatch");
    }
    const long long rows = blocks[0]->rows();
    const long long cols = blocks[0]->cols();
    std::vector<SparseMatrix::Triplet> triplets;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const SparseMatrix& m = *blocks[b];
        if (m.rows() != rows || m.cols() != cols) {
            throw std::invalid_argument("linear_combination: block dimensions differ");
        }
        for (long long c = 0; c < cols; ++c) {
            for (long long k = m.col_ptr()[c]; k < m.col_ptr()[c + 1]; ++k) {
                triplets.push_back({m.row_idx()[k], c, coefficients[b] * m.values()[k]});
            }
        }
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

PartitionedMatrix::PartitionedMatrix(SparseMatrix matrix, long long blocks, bool pad) {
    split(matrix, blocks, pad);
}

PartitionedMatrix::PartitionedMatrix(const DenseMatrix& matrix, long long blocks, bool pad) {
    split(SparseMatrix::from_dense(matrix), blocks, pad);
}

void PartitionedMatrix::split(const SparseMatrix& matrix, long long blocks, bool pad) {
    if (blocks <= 0) throw std::invalid_argument("partition: block count must be positive");
    rows_ = matrix.rows();
    cols_ = matrix.cols();
    long long total = cols_;
    if (total % blocks != 0) {
        if (!pad) {
            throw std::invalid_argument("partition: column count not divisible by block count");
        }
        total += blocks - total % blocks;
    }
    padded_cols_ = total - cols_;
    block_width_ = total / blocks;

    blocks_.reserve(static_cast<std::size_t>(blocks));
    for (long long b = 0; b < blocks; ++b) {
        const long long first = b * block_width_;
        if (first + block_width_ <= cols_) {
            blocks_.push_back(std::make_shared<const SparseMatrix>(
                matrix.column_slice(first, block_width_)));
        } else {
            // Trailing block crosses the padded region; real columns first,
            // zero columns after.
            const long long real = std::max<long long>(0, cols_ - first);
            SparseMatrix slice = real > 0 ? matrix.column_slice(first, real)
                                          : SparseMatrix(rows_, 0);
            std::vector<SparseMatrix::Triplet> triplets;
            for (long long c = 0; c < real; ++c) {
                for (long long k = slice.col_ptr()[c]; k < slice.col_ptr()[c + 1]; ++k) {
                    triplets.push_back({slice.row_idx()[k], c, slice.values()[k]});
                }
            }
            blocks_.push_back(std::make_shared<const SparseMatrix>(
                SparseMatrix::from_triplets(rows_, block_width_, std::move(triplets))));
        }
    }
}

GramProduct gram_product(const SparseMatrix& ai, const SparseMatrix& bj) {
    if (ai.rows() != bj.rows()) {
        throw std::invalid_argument("gram_product: row counts differ");
    }
    GramProduct out;
    out.value = DenseMatrix::Zero(ai.cols(), bj.cols());

    // Row-major view of bj so each nonzero of ai scatters into its row.
    const long long rows = bj.rows();
    std::vector<long long> row_count(static_cast<std::size_t>(rows), 0);
    for (long long i = 0; i < bj.nnz(); ++i) row_count[bj.row_idx()[i]]++;
    std::vector<long long> row_start(static_cast<std::size_t>(rows) + 1, 0);
    for (long long r = 0; r < rows; ++r) row_start[r + 1] = row_start[r] + row_count[r];
    std::vector<long long> b_col(static_cast<std::size_t>(bj.nnz()));
    std::vector<double> b_val(static_cast<std::size_t>(bj.nnz()));
    {
        std::vector<long long> cursor(row_start.begin(), row_start.end() - 1);
        for (long long c = 0; c < bj.cols(); ++c) {
            for (long long k = bj.col_ptr()[c]; k < bj.col_ptr()[c + 1]; ++k) {
                const long long r = bj.row_idx()[k];
                b_col[cursor[r]] = c;
                b_val[cursor[r]] = bj.values()[k];
                ++cursor[r];
            }
        }
    }

    std::uint64_t madds = 0;
    for (long long ca = 0; ca < ai.cols(); ++ca) {
        for (long long k = ai.col_ptr()[ca]; k < ai.col_ptr()[ca + 1]; ++k) {
            const long long r = ai.row_idx()[k];
            const double va = ai.values()[k];
            for (long long j = row_start[r]; j < row_start[r + 1]; ++j) {
                out.value(ca, b_col[j]) += va * b_val[j];
                ++madds;
            }
        }
    }
    out.flops = 2 * madds;
    return out;
}

DenseMatrix gram_product(const DenseMatrix& ai, const DenseMatrix& bj) {
    if (ai.rows() != bj.rows()) {
        throw std::invalid_argument("gram_product: row counts differ");
    }
    return ai.transpose() * bj;
}

double default_rank_tol(const DenseMatrix& m) {
    return 1e-10 * static_cast<double>(std::max(m.rows(), m.cols()));
}

long long numerical_rank(const DenseMatrix& m, double rel_tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    if (rel_tol <= 0) rel_tol = default_rank_tol(m);
    Eigen::JacobiSVD<DenseMatrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cutoff = rel_tol * sv(0);
    long long rank = 0;
    for (long long i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

double condition_number(const DenseMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) {
        throw std::invalid_argument("condition_number: empty matrix");
    }
    Eigen::JacobiSVD<DenseMatrix> svd(m);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (smax == 0.0) throw std::invalid_argument("condition_number: zero matrix");
    if (smin < std::numeric_limits<double>::min()) {
        return std::numeric_limits<double>::infinity();
    }
    return smax / smin;
}

LeastSquaresSolution solve_least_squares(const DenseMatrix& m, const DenseMatrix& rhs) {
    if (m.rows() != rhs.rows()) {
        throw std::invalid_argument("solve_least_squares: row counts differ");
    }
    if (numerical_rank(m) < m.cols()) {
        throw std::invalid_argument("solve_least_squares: rank-deficient system");
    }
    Eigen::ColPivHouseholderQR<DenseMatrix> qr(m);
    LeastSquaresSolution out;
    out.solution = qr.solve(rhs);
    out.residual_norm = (m * out.solution - rhs).norm();
    return out;
}

DenseMatrix khatri_rao_columns(const DenseMatrix& ga, const DenseMatrix& gb) {
    if (ga.cols() != gb.cols()) {
        throw std::invalid_argument("khatri_rao_columns: column counts differ");
    }
    DenseMatrix out(ga.rows() * gb.rows(), ga.cols());
    for (long long j = 0; j < ga.cols(); ++j) {
        for (long long a = 0; a < ga.rows(); ++a) {
            out.block(a * gb.rows(), j, gb.rows(), 1) = ga(a, j) * gb.col(j);
        }
    }
    return out;
}

} // namespace codedmm
