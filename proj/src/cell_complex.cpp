#include "binring/cell_complex.hpp"

#include <algorithm>

#include "binring/errors.hpp"

namespace binring {

CellComplex::CellComplex(std::vector<int> dims, std::vector<Incidence> incs)
    : dim_(std::move(dims)), incs_(std::move(incs)) {
    const int n = (int)dim_.size();
    for (int d : dim_)
        if (d < 0) fail("degree-out-of-range", "cell dimension is negative");
    top_ = 0;
    for (int d : dim_) top_ = std::max(top_, d);
    by_dim_.assign(top_ + 1, {});
    pos_.assign(n, 0);
    for (int c = 0; c < n; ++c) {
        pos_[c] = (int)by_dim_[dim_[c]].size();
        by_dim_[dim_[c]].push_back(c);
    }
    for (const Incidence& inc : incs_) {
        if (inc.tau < 0 || inc.tau >= n || inc.sigma < 0 || inc.sigma >= n)
            fail("rank-mismatch", "incidence refers to a missing cell");
        if (dim_[inc.sigma] != dim_[inc.tau] + 1)
            fail("rank-mismatch", "incidence does not join adjacent dimensions");
        if (inc.sign == 0) fail("rank-mismatch", "incidence sign must be nonzero");
    }
    for (int d = 0; d + 1 < top_; ++d) {
        if (!(coboundary(d + 1) * coboundary(d)).is_zero())
            fail("rank-mismatch", "cell incidence does not square to zero");
    }
}

const std::vector<int>& CellComplex::cells_of_dim(int d) const {
    static const std::vector<int> empty;
    if (d < 0 || d > top_) return empty;
    return by_dim_[d];
}

IntMatrix CellComplex::coboundary(int d) const {
    const int rows = d + 1 <= top_ ? (int)by_dim_[d + 1].size() : 0;
    const int cols = d >= 0 && d <= top_ ? (int)by_dim_[d].size() : 0;
    std::vector<IntMatrix::Entry> entries;
    for (const Incidence& inc : incs_)
        if (dim_[inc.tau] == d)
            entries.push_back({pos_[inc.sigma], pos_[inc.tau], Int(inc.sign)});
    return IntMatrix::from_triplets(rows, cols, entries);
}

CellComplex CellComplex::point() { return CellComplex({0}, {}); }

CellComplex CellComplex::circle(int n) {
    if (n < 3) fail("rank-mismatch", "a cycle needs at least three vertices");
    std::vector<int> dims(2 * n);
    std::vector<Incidence> incs;
    for (int i = 0; i < n; ++i) dims[i] = 0;
    for (int i = 0; i < n; ++i) dims[n + i] = 1;
    for (int i = 0; i < n; ++i) {
        incs.push_back({i, n + i, -1});
        incs.push_back({(i + 1) % n, n + i, +1});
    }
    return CellComplex(std::move(dims), std::move(incs));
}

namespace {

/* Shared construction for the boundary of the 3-simplex, optionally with
 * the interior cell.  Vertices 0..3, edge (i,j) for i<j, face (i,j,k):
 * the usual alternating-sign boundary of an ordered simplex. */
CellComplex simplex3(bool with_interior) {
    std::vector<int> dims;
    std::vector<CellComplex::Incidence> incs;
    for (int v = 0; v < 4; ++v) dims.push_back(0);
    int edge_id[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            edge_id[i][j] = (int)dims.size();
            dims.push_back(1);
            incs.push_back({i, edge_id[i][j], -1});
            incs.push_back({j, edge_id[i][j], +1});
        }
    int face_id[4];
    int fi = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) {
                face_id[fi] = (int)dims.size();
                dims.push_back(2);
                incs.push_back({edge_id[j][k], face_id[fi], +1});
                incs.push_back({edge_id[i][k], face_id[fi], -1});
                incs.push_back({edge_id[i][j], face_id[fi], +1});
                ++fi;
            }
    if (with_interior) {
        const int body = (int)dims.size();
        dims.push_back(3);
        // faces enumerate as (123),(023),(013),(012) omitted-vertex order 0,1,2,3
        // reversed: boundary of (0123) = (123) - (023) + (013) - (012).
        int sign = +1;
        for (int f = 3; f >= 0; --f) {
            incs.push_back({face_id[f], body, sign});
            sign = -sign;
        }
    }
    return CellComplex(std::move(dims), std::move(incs));
}

}  // namespace

CellComplex CellComplex::sphere2() { return simplex3(false); }

CellComplex CellComplex::ball3() { return simplex3(true); }

}  // namespace binring
