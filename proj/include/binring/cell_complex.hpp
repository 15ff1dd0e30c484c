#pragma once

#include <vector>

#include "binring/int_matrix.hpp"

namespace binring {

/* Finite regular CW complex, recorded by cell dimensions and the signed
 * incidence numbers [tau : sigma] between cells of adjacent dimension.
 * Cells are global indices; validation checks that the induced cellular
 * cochain maps square to zero. */
class CellComplex {
public:
    struct Incidence {
        int tau;    // lower cell
        int sigma;  // upper cell, dim(sigma) = dim(tau) + 1
        int sign;
    };

    CellComplex() : CellComplex(std::vector<int>{}, {}) {}
    CellComplex(std::vector<int> dims, std::vector<Incidence> incs);

    int cell_count() const { return (int)dim_.size(); }
    int dim_of(int cell) const { return dim_[cell]; }
    int top_dim() const { return top_; }
    const std::vector<int>& cells_of_dim(int d) const;
    const std::vector<Incidence>& incidences() const { return incs_; }

    /* Signed incidence matrix C_d -> C_{d+1} in the per-dimension cell
     * order (the cochain differential of the constant sheaf Z). */
    IntMatrix coboundary(int d) const;

    /* Position of a cell inside cells_of_dim(dim_of(cell)). */
    int index_in_dim(int cell) const { return pos_[cell]; }

    static CellComplex point();
    /* Cycle graph with n vertices and n edges, edge i running i -> i+1. */
    static CellComplex circle(int n);
    /* Boundary of the 3-simplex: 4 + 6 + 4 cells. */
    static CellComplex sphere2();
    /* Solid 3-simplex: sphere2 plus the interior cell. */
    static CellComplex ball3();

private:
    std::vector<int> dim_;
    std::vector<Incidence> incs_;
    std::vector<std::vector<int>> by_dim_;
    std::vector<int> pos_;
    int top_ = 0;
};

}  // namespace binring
