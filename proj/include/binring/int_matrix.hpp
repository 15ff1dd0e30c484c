#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "binring/errors.hpp"

namespace binring {

using Int = mpz_class;

/* Sparse matrix over Z.  Entries are kept sorted by (row, col) with no
 * explicit zeros; shapes with zero rows or columns are legal and show up
 * constantly at the ends of cochain complexes. */
class IntMatrix {
public:
    struct Entry {
        int32_t r;
        int32_t c;
        Int v;
    };

    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(int rows, int cols);

    static IntMatrix identity(int n);
    static IntMatrix diagonal(int rows, int cols, const std::vector<Int>& d);
    static IntMatrix from_triplets(int rows, int cols, std::vector<Entry> ents);
    static IntMatrix from_dense(const std::vector<std::vector<long>>& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t nnz() const { return ents_.size(); }
    const std::vector<Entry>& entries() const { return ents_; }

    Int at(int r, int c) const;
    bool is_zero() const { return ents_.empty(); }

    IntMatrix transpose() const;
    IntMatrix operator*(const IntMatrix& o) const;
    IntMatrix operator+(const IntMatrix& o) const;
    IntMatrix operator-(const IntMatrix& o) const;
    IntMatrix scaled(const Int& s) const;
    bool operator==(const IntMatrix& o) const;

    /* Block [this | o] resp. [this; o]. */
    IntMatrix hstack(const IntMatrix& o) const;
    IntMatrix vstack(const IntMatrix& o) const;

    /* Rows and columns picked by index lists, in the given order. */
    IntMatrix submatrix(const std::vector<int>& rs, const std::vector<int>& cs) const;
    IntMatrix select_columns(const std::vector<int>& cs) const;
    IntMatrix select_rows(const std::vector<int>& rs) const;

    std::vector<Int> apply(const std::vector<Int>& x) const;
    std::vector<std::vector<Int>> to_dense() const;
    std::string to_string() const;

private:
    int rows_;
    int cols_;
    std::vector<Entry> ents_;
};

}  // namespace binring
