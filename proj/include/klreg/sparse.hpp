#ifndef KLREG_SPARSE_HPP_
#define KLREG_SPARSE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "klreg/vec.hpp"

namespace klreg {

// Counts matrix-vector products (forward and transposed alike). One counter
// per solver run; never shared across runs.
struct OpCounter {
    long long count = 0;
};

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/**
 * Immutable nonnegative sparse matrix in compressed-row storage.
 *
 * Construction rejects negative entries, all-zero rows and all-zero columns:
 * a zero row makes log(Ax/b) undefined for interior x, and a zero column
 * leaves that coordinate unconstrained by the data. Transpose products run
 * as a scatter pass over the stored rows; no transposed copy is kept.
 */
class SparseMatrix {
  public:
    SparseMatrix() = default;

    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> entries) {
        if (rows <= 0 || cols <= 0) throw std::invalid_argument("matrix dimensions must be positive");
        for (const Triplet& t : entries) {
            if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
                throw std::invalid_argument("triplet index out of range");
            if (t.value < 0.0) throw std::invalid_argument("negative entry in nonnegative matrix");
        }
        std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        SparseMatrix A;
        A.rows_ = rows;
        A.cols_ = cols;
        A.indptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
        for (std::size_t k = 0; k < entries.size(); ++k) {
            // merge duplicates, drop explicit zeros
            double v = entries[k].value;
            std::size_t k2 = k;
            while (k2 + 1 < entries.size() && entries[k2 + 1].row == entries[k].row &&
                   entries[k2 + 1].col == entries[k].col) {
                ++k2;
                v += entries[k2].value;
            }
            if (v != 0.0) {
                A.indices_.push_back(entries[k].col);
                A.data_.push_back(v);
                ++A.indptr_[static_cast<std::size_t>(entries[k].row) + 1];
            }
            k = k2;
        }
        for (int i = 0; i < rows; ++i) A.indptr_[i + 1] += A.indptr_[i];
        A.validate();
        return A;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    long long nnz() const { return static_cast<long long>(data_.size()); }

    Vec apply(const Vec& x) const {
        if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("matvec: dimension mismatch");
        Vec y(static_cast<std::size_t>(rows_), 0.0);
        for (int i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (int k = indptr_[i]; k < indptr_[i + 1]; ++k) s += data_[k] * x[indices_[k]];
            y[i] = s;
        }
        return y;
    }

    Vec apply_transpose(const Vec& u) const {
        if (static_cast<int>(u.size()) != rows_) throw std::invalid_argument("rmatvec: dimension mismatch");
        Vec y(static_cast<std::size_t>(cols_), 0.0);
        for (int i = 0; i < rows_; ++i) {
            const double ui = u[i];
            for (int k = indptr_[i]; k < indptr_[i + 1]; ++k) y[indices_[k]] += data_[k] * ui;
        }
        return y;
    }

    // induced l1 operator norm = max column sum (entries are nonnegative)
    double one_norm() const {
        Vec colsum(static_cast<std::size_t>(cols_), 0.0);
        for (std::size_t k = 0; k < data_.size(); ++k) colsum[indices_[k]] += data_[k];
        double m = 0.0;
        for (double s : colsum) m = std::max(m, s);
        return m;
    }

    const std::vector<int>& indptr() const { return indptr_; }
    const std::vector<int>& indices() const { return indices_; }
    const std::vector<double>& values() const { return data_; }

  private:
    void validate() const {
        std::vector<char> col_hit(static_cast<std::size_t>(cols_), 0);
        for (int i = 0; i < rows_; ++i) {
            if (indptr_[i] == indptr_[i + 1])
                throw std::invalid_argument("all-zero row " + std::to_string(i + 1));
            for (int k = indptr_[i]; k < indptr_[i + 1]; ++k) col_hit[indices_[k]] = 1;
        }
        for (int j = 0; j < cols_; ++j)
            if (!col_hit[j]) throw std::invalid_argument("all-zero column " + std::to_string(j + 1));
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> indptr_;
    std::vector<int> indices_;
    std::vector<double> data_;
};

inline Vec matvec(const SparseMatrix& A, const Vec& x, OpCounter& ops) {
    ++ops.count;
    return A.apply(x);
}

inline Vec rmatvec(const SparseMatrix& A, const Vec& u, OpCounter& ops) {
    ++ops.count;
    return A.apply_transpose(u);
}

inline double one_norm(const SparseMatrix& A) { return A.one_norm(); }

/**
 * Coordinate text format: first line "m n nnz", then one "i j v" per entry
 * with 1-based indices. '%' starts a comment line. Whitespace separated.
 */
inline SparseMatrix from_coordinate_text(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_data_line = [&](std::string& out) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            std::size_t p = line.find_first_not_of(" \t\r");
            if (p == std::string::npos || line[p] == '%') continue;
            out = line;
            return true;
        }
        return false;
    };
    std::string hdr;
    if (!next_data_line(hdr)) throw std::invalid_argument("empty coordinate stream");
    long long m = 0, n = 0, nnz = 0;
    {
        std::istringstream hs(hdr);
        if (!(hs >> m >> n >> nnz) || m <= 0 || n <= 0 || nnz < 0)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": bad header");
    }
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(nnz));
    for (long long k = 0; k < nnz; ++k) {
        std::string row;
        if (!next_data_line(row))
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(nnz) + " entries, got " + std::to_string(k));
        std::istringstream rs(row);
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(rs >> i >> j >> v))
            throw std::invalid_argument("line " + std::to_string(lineno) + ": malformed entry");
        if (i < 1 || i > m || j < 1 || j > n)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": index out of range");
        if (v < 0.0)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": negative value");
        trips.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
    }
    return SparseMatrix::from_triplets(static_cast<int>(m), static_cast<int>(n), std::move(trips));
}

inline void to_coordinate_text(std::ostream& out, const SparseMatrix& A) {
    out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
    char buf[64];
    for (int i = 0; i < A.rows(); ++i) {
        for (int k = A.indptr()[i]; k < A.indptr()[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", A.values()[k]);
            out << (i + 1) << ' ' << (A.indices()[k] + 1) << ' ' << buf << '\n';
        }
    }
}

}  // namespace klreg

#endif  // KLREG_SPARSE_HPP_
