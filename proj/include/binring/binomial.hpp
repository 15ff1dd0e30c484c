#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "binring/int_matrix.hpp"

namespace binring {

/* Exponent multi-index k = (k_1, ..., k_r), stored sparsely as (coordinate,
 * exponent) pairs with coordinates strictly increasing and exponents > 0.
 * Stands for the basis function prod_i binom(x_i, k_i). */
struct MultiIndex {
    std::vector<std::pair<int, int>> e;

    int total_degree() const;
    int exponent(int coord) const;
    static MultiIndex from_dense(const std::vector<int>& dense);
    std::vector<int> to_dense(int rank) const;
    std::string to_string(int rank) const;  // "k1,k2,...,kr"

    bool operator==(const MultiIndex& o) const { return e == o.e; }
    bool operator<(const MultiIndex& o) const;  // graded-lex (see below)
};

/* Basis order: total degree ascending, then lexicographic ascending on the
 * dense exponent tuple.  This is the serialization order everywhere. */
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

/* Bin^{<=t}(Z^r): the lattice of integer-valued polynomial functions of
 * degree <= t on Z^r, with the binomial-product basis in graded-lex order. */
class TruncatedBinAlgebra {
public:
    TruncatedBinAlgebra(int rank, int trunc);

    int rank() const { return rank_; }
    int trunc() const { return trunc_; }
    long size() const { return (long)basis_.size(); }
    const MultiIndex& index_at(long pos) const { return basis_[pos]; }
    long position(const MultiIndex& k) const;  // -1 when not a basis index
    const std::vector<MultiIndex>& basis() const { return basis_; }

private:
    int rank_, trunc_;
    std::vector<MultiIndex> basis_;
};

/* An element of Bin^{<=t}(Z^r): dense coordinates in basis order. */
struct BinElement {
    int rank = 0;
    int trunc = 0;
    std::vector<Int> coords;

    bool operator==(const BinElement& o) const = default;
};

using EvalOracle = std::function<Int(const std::vector<Int>&)>;

/* binom(a, k) for any integer a (falling-factorial extension). */
Int binom_int(const Int& a, unsigned long k);

BinElement zero_element(int rank, int trunc);
BinElement basis_element(int rank, int trunc, const MultiIndex& k);

/* Iterated finite differences of f at 0 over the grid {0..t}^r, verified by
 * re-evaluation against f on {0..t+1}^r; "not-polynomial-of-degree-t" when
 * the degree bound is falsified. */
BinElement mahler_expand(const EvalOracle& f, int rank, int trunc);

Int evaluate(const BinElement& e, const std::vector<Int>& a);

/* Pointwise product, living in Bin^{<= ta+tb}.  "rank-mismatch" guarded. */
BinElement multiply(const BinElement& a, const BinElement& b);

/* Element of Bin^{<=t}(Z^r) (x) Bin^{<=t}(Z^r): sparse coordinates on pairs
 * of basis positions of the common parent algebra. */
struct BinTensor {
    int rank = 0;
    int trunc = 0;
    std::vector<std::tuple<long, long, Int>> coords;  // (left, right, coeff)

    bool operator==(const BinTensor& o) const = default;
};

/* Hopf comultiplication: the expansion of (a, b) |-> e(a + b). */
BinTensor comultiply(const BinElement& e);

/* (e(0), e - e(0)*1): the splitting Bin = Z + reduced part. */
std::pair<Int, BinElement> splitting_components(const BinElement& e);

/* Covariant functoriality: the matrix of Bin^{<=t}(Z^r) -> Bin^{<=t}(Z^s)
 * for a lattice map f (s x r), sending a basis function g to g o f^T. */
IntMatrix induced_map(const IntMatrix& f, int trunc);

/* Precomposition with an affine-integral substitution: the matrix of
 * Bin^{<=t}(Z^r) -> Bin^{<=t}(Z^s) sending a basis function g(x) to
 * g(c + m y), where m is r x s and c has length r.  Rows of m may share
 * target variables.  affine_induced_map(f^T, 0, t) == induced_map(f, t). */
IntMatrix affine_induced_map(const IntMatrix& m, const std::vector<Int>& c, int trunc);

/* Filtered-monad composition Bin^{<=outer}(Bin^{<=inner}(Z^rank)) ->
 * Bin^{<= outer*inner}(Z^rank): precomposition with the evaluation map whose
 * coordinates are the inner basis functions. */
IntMatrix monad_compose(int rank, int inner, int outer);

/* The integer-valued function of a polynomial given in monomial coordinates
 * (exponent multi-index, coefficient), expanded in the binomial basis. */
BinElement sym_to_bin(const std::vector<std::pair<MultiIndex, Int>>& poly, int rank, int trunc);

/* Coordinates of e on the top graded piece (indices of total degree exactly
 * trunc), in basis order: the image in gr_t = Gamma^t. */
std::vector<Int> gr_projection(const BinElement& e);

/* Minimal period of x |-> binom(x, k) modulo p^n.  "not-prime" guarded. */
Int mod_pn_period(int k, const Int& p, int n);

/* ------------------------------------------------------------------ *
 * Expansion engine: closed-form rewriting of binomial-coefficient
 * functions of affine forms into the product basis.  Used for induced
 * maps and the levelwise pipelines, where evaluation grids would be
 * exponentially large.  Cross-tested against mahler_expand.
 * ------------------------------------------------------------------ */

/* Sparse integer-valued polynomial keyed by multi-index (graded-lex). */
using SparsePoly = std::map<MultiIndex, Int>;

struct ExpandCache {
    /* binom(c*x, k) = sum_u coeff[u] * binom(x, u), u = 0..k */
    std::map<std::pair<Int, int>, std::vector<Int>> rescale;
    /* binom(x,u)*binom(x,v) = sum_w coeff[w] * binom(x, w), w = 0..u+v */
    std::map<std::pair<int, int>, std::vector<Int>> product;
};

const std::vector<Int>& rescale_coeffs(ExpandCache& cache, const Int& c, int k);
const std::vector<Int>& product_coeffs(ExpandCache& cache, int u, int v);

/* Product with truncation at total degree `trunc`.  Dropping overflow terms
 * is safe downstream because basis products never lower total degree. */
SparsePoly poly_mul(const SparsePoly& a, const SparsePoly& b, int trunc, ExpandCache& cache);

/* binom(b + sum_j c_j * x_{v_j}, k), truncated at total degree `trunc`.
 * `linear` lists (variable, coefficient) with distinct variables. */
SparsePoly expand_affine_binom(const Int& b, const std::vector<std::pair<int, Int>>& linear,
                               int k, int trunc, ExpandCache& cache);

}  // namespace binring
