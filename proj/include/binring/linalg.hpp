#pragma once

#include <optional>
#include <string>
#include <vector>

#include "binring/int_matrix.hpp"

namespace binring {

/* Finitely generated abelian group in invariant-factor form: free_rank
 * copies of Z plus Z/f_1 + ... + Z/f_k with 2 <= f_1 | f_2 | ... | f_k.
 * Factors equal to 1 are never stored. */
struct FgAbGroup {
    long free_rank = 0;
    std::vector<Int> factors;

    bool is_trivial() const { return free_rank == 0 && factors.empty(); }
    bool is_finite() const { return free_rank == 0; }
    Int order() const;  // "not-finite" when free_rank > 0
    std::string to_string() const;
    bool operator==(const FgAbGroup& o) const {
        return free_rank == o.free_rank && factors == o.factors;
    }
};

struct SmithResult {
    /* Invariant factors d_1 | d_2 | ... | d_r, all positive, including 1s;
     * r is the rank.  When transforms are requested, U * M * V equals the
     * rows x cols matrix with diag placed at (i, i). */
    std::vector<Int> diag;
    std::optional<IntMatrix> u;
    std::optional<IntMatrix> v;
};

/* Fraction-free elimination with fill-minimizing pivoting; transforms are
 * accumulated only on request. */
SmithResult smith_normal_form(const IntMatrix& m, bool want_transforms = false);

long rank(const IntMatrix& m);

/* Z^rows / (column span of m). */
FgAbGroup cokernel_structure(const IntMatrix& m);

/* Columns form a basis of ker(m); the basis spans a saturated sublattice. */
IntMatrix hermite_kernel(const IntMatrix& m);

/* X with a * X = b; every column of b must lie in the column span of a
 * over Z ("unsolvable" otherwise). */
IntMatrix solve_columns(const IntMatrix& a, const IntMatrix& b);

/* Pontryagin dual; same invariant factors.  "not-finite" on free rank. */
FgAbGroup dual_finite_group(const FgAbGroup& g);

/* k-th exterior power of the linear map f, in the basis of ordered
 * k-subsets taken in lexicographic order. */
IntMatrix exterior_power(const IntMatrix& f, int k);

/* Bounded cochain complex of lattices, degrees lo .. lo+ranks.size()-1.
 * diffs[i] maps degree lo+i to degree lo+i+1. */
struct LatticeCochainComplex {
    int lo = 0;
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;

    int hi() const { return lo + (int)ranks.size() - 1; }
    long rank_at(int deg) const;
    IntMatrix diff_at(int deg) const;  // zero-shaped map outside the support
    void validate() const;             // shapes and d o d = 0
};

/* H^i as computed through SNF: restrict d^{i-1} to a Hermite kernel basis
 * of d^i, then read off the cokernel.  "degree-out-of-range" when i is
 * outside [lo, hi]. */
FgAbGroup complex_cohomology(const LatticeCochainComplex& c, int i);

/* Cohomology at the middle of  Z^a -d0-> Z^mid -d1-> Z^c  (d1 * d0 = 0).
 * Shrinks the pair by unit-pivot Gaussian cancellation first, then uses
 * rank-nullity for the free part and SNF of the reduced d0 for the torsion
 * (ker d1 is saturated, so coker torsion equals cohomology torsion). */
FgAbGroup cohomology_of_pair(const IntMatrix& d0, const IntMatrix& d1);

/* The cancellation core by itself, exposed for cross-testing: the returned
 * pair is chain homotopy equivalent to the input pair. */
struct ReducedPair {
    IntMatrix d0;
    IntMatrix d1;
};
ReducedPair gaussian_reduce_pair(const IntMatrix& d0, const IntMatrix& d1);

}  // namespace binring
