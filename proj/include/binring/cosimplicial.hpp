#pragma once

#include <cstdint>
#include <vector>

#include "binring/int_matrix.hpp"
#include "binring/linalg.hpp"

namespace binring {

/* Monotone surjection [m] ->> [k], encoded by its jump set: bit j set
 * means the value increases from position j to j+1 (so k = popcount). */
struct Surjection {
    int level = 0;
    uint32_t jumps = 0;

    int degree() const { return __builtin_popcount(jumps); }
    int apply(int x) const { return __builtin_popcount(jumps & ((1u << x) - 1u)); }
};

/* Cosimplicial lattice with levels 0..levels.
 *   coface[m][j]  : X^m -> X^{m+1}   (j = 0..m+1, for m < levels)
 *   codegen[m][j] : X^m -> X^{m-1}   (j = 0..m-1, for m >= 1) */
struct CosimplicialLattice {
    int levels = 0;
    std::vector<long> ranks;
    std::vector<std::vector<IntMatrix>> coface;
    std::vector<std::vector<IntMatrix>> codegen;

    /* Checks the full set of cosimplicial identities on the stored range;
     * "cosimplicial-identity-violation" on failure.  Products larger than
     * `exact_rank` on a side are verified on seeded random vectors instead
     * of full matrix products (still exact integer equalities). */
    void validate(long exact_rank = 100000) const;
};

/* Levelwise Dold-Kan construction of a coconnective cochain complex:
 * X^m = sum of C^k over surjections [m] ->> [k], summands ordered by
 * ascending jump mask.  Structure maps: for beta: [m] -> [m'], the
 * component into the alpha-summand factors alpha o beta through its
 * epi-mono factorization; the mono part acts as the identity when it is
 * one, as the complex differential when it misses exactly the top, and
 * as zero otherwise. */
struct DoldKanLevels {
    struct Summand {
        uint32_t mask = 0;
        int degree = 0;
        long offset = 0;
    };

    LatticeCochainComplex c;
    CosimplicialLattice x;
    std::vector<std::vector<Summand>> summands;  // per level
};

DoldKanLevels dold_kan_cosimplicial(const LatticeCochainComplex& c, int levels);

/* Bin^{<=trunc} applied to every level and every structure map, with the
 * cosimplicial identities re-verified on the result. */
CosimplicialLattice apply_bin_levelwise(const CosimplicialLattice& x, int trunc);

/* Cohomology of the associated cochain complex in one degree.
 * Unnormalized: alternating sums of the cofaces on full levels.
 * Normalized: the same differential restricted to the joint kernel of the
 * codegeneracies.  Both are exposed so they can be cross-tested.
 * "need-more-levels" when the stored levels do not reach degree + 1. */
FgAbGroup total_cohomology(const CosimplicialLattice& x, int degree, bool normalized);

/* ------------------------------------------------------------------ *
 * Fused normalized pipeline: degree-i cohomology of Bin^{<=t} applied
 * levelwise to the Dold-Kan levels of c, enumerating the normalized
 * basis directly (a product basis function lies in the joint kernel of
 * the codegeneracy pullbacks exactly when the jump sets of its support
 * cover every position) and expanding the differential columns in
 * closed form.  Equivalent to the literal pipeline; cross-tested.
 * ------------------------------------------------------------------ */

/* The fused path needs every row of every complex differential to carry
 * at most one nonzero entry (so coface pullbacks have disjoint supports),
 * plus small packing bounds. */
bool fused_path_supported(const LatticeCochainComplex& c, int trunc);

FgAbGroup fused_bin_cohomology(const LatticeCochainComplex& c, int trunc, int degree);

/* Normalized basis size at one cosimplicial level (for rank cross-tests). */
long fused_normalized_rank(const LatticeCochainComplex& c, int trunc, int level);

/* Invariant-factor form of a finite direct sum of groups. */
FgAbGroup direct_sum_groups(const std::vector<FgAbGroup>& parts);

}  // namespace binring
