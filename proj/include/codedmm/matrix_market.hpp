#pragma once

#include "codedmm/linalg.hpp"

#include <iosfwd>
#include <string>

namespace codedmm {

/// Matrix Market I/O, coordinate (sparse) and array (dense) formats,
/// real general only.  Values are written with 17 significant digits so
/// round trips are lossless.

SparseMatrix read_matrix_market_sparse(std::istream& in);
SparseMatrix read_matrix_market_sparse(const std::string& path);
DenseMatrix read_matrix_market_dense(std::istream& in);
DenseMatrix read_matrix_market_dense(const std::string& path);

void write_matrix_market(std::ostream& out, const SparseMatrix& m);
void write_matrix_market(const std::string& path, const SparseMatrix& m);
void write_matrix_market(std::ostream& out, const DenseMatrix& m);
void write_matrix_market(const std::string& path, const DenseMatrix& m);

} // namespace codedmm
