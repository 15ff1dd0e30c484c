#pragma once

#include <optional>

#include "binring/cosimplicial.hpp"
#include "binring/linalg.hpp"

namespace binring {

/* Cochain complex of lattices concentrated in degrees >= 0.  Validation
 * re-checks shapes, d o d = 0, and that the degree-0 cohomology is
 * torsion-free (SNF of a kernel basis of d^0 must be all ones). */
struct CoconnectiveLatticeComplex {
    LatticeCochainComplex c;

    void validate() const;
};

/* Dual model of the Eilenberg-MacLane space K(A, n): the free part of A
 * contributes Z^r in degree n, and each invariant factor m contributes the
 * two-term piece  Z --m--> Z  in degrees n, n+1. */
CoconnectiveLatticeComplex dual_complex_of_group(const FgAbGroup& a, int n);

/* Two-term complex in degrees 0, 1 with H^0 = 0 and H^1 = A: the invariant
 * factors sit on the diagonal and the free part is padded with zero rows. */
CoconnectiveLatticeComplex resolution_complex_of_group(const FgAbGroup& a);

/* H^degree of Bin^{<=trunc} applied levelwise to the Dold-Kan cosimplicial
 * lattice of c, using the fused normalized pipeline when the differentials
 * are row-disjoint and the literal one otherwise. */
FgAbGroup truncated_bin_cohomology(const CoconnectiveLatticeComplex& c, int trunc, int degree);

struct EmResult {
    FgAbGroup h;
    int trunc_used = 0;

    bool operator==(const EmResult& o) const = default;
};

/* H^i(K(A, n); Z) through the truncated binomial model.  With an explicit
 * truncation the computation runs once at that value; otherwise it runs at
 * t = max(i, 1) and t + 1 and insists the answers agree
 * ("truncation-unstable" when they do not).  n must be >= 1
 * ("connective-range-unsupported" otherwise). */
EmResult em_cohomology(const FgAbGroup& a, int n, int i,
                       std::optional<int> trunc = std::nullopt);

}  // namespace binring
