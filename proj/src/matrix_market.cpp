#include "codedmm/matrix_market.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace codedmm {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Header {
    bool coordinate = false;
};

Header read_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty stream");
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix") {
        throw std::runtime_error("matrix market: bad banner");
    }
    if (field != "real" || symmetry != "general") {
        throw std::runtime_error("matrix market: only real general supported");
    }
    Header h;
    if (format == "coordinate") {
        h.coordinate = true;
    } else if (format != "array") {
        throw std::runtime_error("matrix market: unknown format " + format);
    }
    return h;
}

std::string next_data_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') return line;
    }
    throw std::runtime_error("matrix market: truncated file");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

} // namespace

SparseMatrix read_matrix_market_sparse(std::istream& in) {
    const Header h = read_header(in);
    std::istringstream size(next_data_line(in));
    long long rows = 0, cols = 0, entries = 0;
    if (h.coordinate) {
        size >> rows >> cols >> entries;
        std::vector<SparseMatrix::Triplet> triplets;
        triplets.reserve(static_cast<std::size_t>(entries));
        for (long long i = 0; i < entries; ++i) {
            std::istringstream ls(next_data_line(in));
            long long r = 0, c = 0;
            double v = 0;
            if (!(ls >> r >> c >> v)) throw std::runtime_error("matrix market: bad entry");
            triplets.push_back({r - 1, c - 1, v});
        }
        return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
    }
    size >> rows >> cols;
    DenseMatrix d(rows, cols);
    for (long long c = 0; c < cols; ++c) {
        for (long long r = 0; r < rows; ++r) {
            std::istringstream ls(next_data_line(in));
            if (!(ls >> d(r, c))) throw std::runtime_error("matrix market: bad entry");
        }
    }
    return SparseMatrix::from_dense(d);
}

SparseMatrix read_matrix_market_sparse(const std::string& path) {
    auto in = open_input(path);
    return read_matrix_market_sparse(in);
}

DenseMatrix read_matrix_market_dense(std::istream& in) {
    return read_matrix_market_sparse(in).to_dense();
}

DenseMatrix read_matrix_market_dense(const std::string& path) {
    auto in = open_input(path);
    return read_matrix_market_dense(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
    for (long long c = 0; c < m.cols(); ++c) {
        for (long long k = m.col_ptr()[c]; k < m.col_ptr()[c + 1]; ++k) {
            out << (m.row_idx()[k] + 1) << " " << (c + 1) << " "
                << format_value(m.values()[k]) << "\n";
        }
    }
}

void write_matrix_market(const std::string& path, const SparseMatrix& m) {
    auto out = open_output(path);
    write_matrix_market(out, m);
}

void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << " " << m.cols() << "\n";
    for (long long c = 0; c < m.cols(); ++c) {
        for (long long r = 0; r < m.rows(); ++r) {
            out << format_value(m(r, c)) << "\n";
        }
    }
}

void write_matrix_market(const std::string& path, const DenseMatrix& m) {
    auto out = open_output(path);
    write_matrix_market(out, m);
}

} // namespace codedmm
