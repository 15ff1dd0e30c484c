#pragma once

#include <vector>

#include "binring/cell_complex.hpp"
#include "binring/int_matrix.hpp"
#include "binring/linalg.hpp"

namespace binring {

/* Cellular sheaf of lattices on the face poset of a cell complex: one
 * stalk per cell, one restriction map per incidence toward the higher
 * cell.  Restrictions are stored parallel to base.incidences() and do
 * not carry the incidence sign; signs enter only in the differential. */
struct CellularLatticeSheaf {
    CellComplex base;
    std::vector<long> stalk_rank;   // per cell
    std::vector<IntMatrix> rest;    // parallel to base.incidences()

    /* Shape checks plus functoriality: composite restrictions through
     * the (two, in a regular complex) intermediate cells of every
     * codimension-2 pair must agree.  "sheaf-not-functorial". */
    void validate() const;
    const IntMatrix& restriction(int tau, int sigma) const;
};

CellularLatticeSheaf constant_sheaf(const CellComplex& base, long rank);

/* Local system on the n-vertex cycle: constant stalks with the wrap-around
 * restriction into the last edge replaced by the monodromy matrix. */
CellularLatticeSheaf circle_local_system(int n, const IntMatrix& monodromy);

/* Stalkwise k-th exterior power. */
CellularLatticeSheaf exterior_power_sheaf(const CellularLatticeSheaf& f, int k);

/* Cochain complex C^k = sum of F(sigma) over k-cells, differential built
 * from signed restrictions, and its cohomology.  Degrees above the top
 * dimension give the trivial group. */
LatticeCochainComplex sheaf_cochain_complex(const CellularLatticeSheaf& f);
FgAbGroup sheaf_cohomology(const CellularLatticeSheaf& f, int i);

/* Two-term complex of cellular sheaves E = [E0 -d-> E1] pointed by the
 * constants:  Z -iota-> E0(sigma) -d_sigma-> E1(sigma)  stalkwise, with
 * ker(d_sigma) = iota(Z) spanned by a primitive vector, so that
 * E0/iota(Z) injects into E1.  Restrictions commute with d and iota. */
struct PointedSheafComplex {
    CellularLatticeSheaf e0;
    CellularLatticeSheaf e1;
    std::vector<IntMatrix> d;                // per cell: E0(sigma) -> E1(sigma)
    std::vector<std::vector<Int>> pointing;  // per cell: iota(1)

    /* "pointing-not-primitive" when iota(1) fails to span the kernel of
     * d_sigma over Z; "rank-mismatch" on shape or commutation failures. */
    void validate() const;
};

/* E0 = constant Z, d = 0, E1 = l, pointing the identity. */
PointedSheafComplex split_model(const CellComplex& base, const CellularLatticeSheaf& l);

/* Combinatorial model of the circle bundle with Euler 2-cocycle `euler`
 * (one integer per 2-cell, in cells_of_dim(2) order): stalks carry a unit
 * u, one angle-branch generator per closure edge subject to the face
 * relation  sum_e [e:f] h_e = euler(f) u,  and one fiber generator per
 * closure vertex, with d h_e = sum_v [v:e] theta_v.  "not-a-cocycle"
 * when the cellular coboundary of `euler` is nonzero. */
PointedSheafComplex circle_bundle_model(const CellComplex& base, const std::vector<Int>& euler);

/* Degree-i cohomology of the total space: stalkwise Dold-Kan levels of
 * [E0 -> E1], coaugmented binomial algebras of the pointed levels, and
 * the cellular direction totalized with the sign (-1)^{cell degree} on
 * the cosimplicial differential.  Computed at trunc and trunc + 1;
 * "truncation-unstable" on disagreement. */
FgAbGroup pushforward_cohomology(const PointedSheafComplex& e, int trunc, int degree);

/* The total complex underlying pushforward_cohomology at one truncation,
 * in degrees 0 .. top_degree; exposed so a sweep over degrees can share
 * one assembly. */
LatticeCochainComplex pushforward_total_complex(const PointedSheafComplex& e, int trunc,
                                                int top_degree);

/* ------------------------------------------------------------------ *
 * Coaugmented binomial stalk: functions on the affine coset
 * { lambda in V^dual : lambda(v) = 1 }.
 * ------------------------------------------------------------------ */

/* Presentation of Bin^{<=trunc} of the coset: a base point lambda0 with
 * lambda0(v) = 1 plus a saturated basis of the annihilator of v turn the
 * coset into Z^{ambient-1}; the basis of the stalk is the binomial basis
 * in those coordinates.  Different choices give conjugate presentations;
 * induced maps transform accordingly. */
struct CoaugStalk {
    int ambient = 0;  // rank of V
    int rank = 0;     // coset coordinates: ambient - 1
    int trunc = 0;
    std::vector<Int> v;     // pointing vector, primitive
    std::vector<Int> base;  // lambda0
    IntMatrix basis;        // ambient x rank

    long size() const;  // binom(rank + trunc, trunc)
};

/* "pointing-not-primitive" unless gcd(v) = 1. */
CoaugStalk coaug_bin_stalk(const std::vector<Int>& v, int trunc);

/* Induced map of a pointed lattice map f: (V, v) -> (W, w), f v = w:
 * precomposition with the dual map H_w -> H_v in coset coordinates. */
IntMatrix coaug_induced(const CoaugStalk& src, const CoaugStalk& tgt, const IntMatrix& f);

}  // namespace binring
