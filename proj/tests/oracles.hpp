#pragma once

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "binring/linalg.hpp"

/* Comparison data computed along routes independent of the library's
 * cosimplicial pipeline: explicit CW cochain complexes entered from the
 * standard cell structures, and an iterated bar construction seeded at the
 * circle.  Everything here is test-side only. */
namespace binring::oracles {

/* ---- CW cochain complexes (degree 0 first, differentials ascending) ---- */

/* Complex projective 3-space: one cell in each even degree 0..6. */
LatticeCochainComplex cp3_complex();

/* Skeleton of infinite real projective space through the given top degree:
 * one cell per degree, coboundaries alternating 0, 2, 0, 2, ... */
LatticeCochainComplex rp_infty_skeleton(int top);

/* Product of the 2-sphere and the circle: ranks 1,1,1,1, zero coboundary. */
LatticeCochainComplex s2_x_s1_complex();

/* The 3-sphere with two cells: ranks 1,0,0,1. */
LatticeCochainComplex s3_complex();

/* Lens space L(k,1): ranks 1,1,1,1 with middle coboundary k.  k >= 2. */
LatticeCochainComplex lens_complex(int k);

/* The 2-torus: ranks 1,2,1, zero coboundary. */
LatticeCochainComplex torus2_complex();

/* The Klein bottle: ranks 1,2,1 with coboundary (2,0) into the top cell. */
LatticeCochainComplex klein_complex();

FgAbGroup complex_h(const LatticeCochainComplex& c, int i);

/* ---- Iterated bar construction --------------------------------------- */

/* A nonnegatively graded differential algebra, free of finite rank in each
 * degree, described by its reduced (positive-degree) basis through maxdeg.
 * diff[d] is the chain differential into degree d-1; mul maps a pair of
 * reduced basis elements to its expansion in degree d1+d2 (dropped
 * silently above maxdeg). */
struct GradedAlgebra {
    int maxdeg = 0;
    std::vector<long> ranks;      // ranks[d], d = 0..maxdeg, degree 0 excluded
    std::vector<IntMatrix> diff;  // diff[d]: ranks[d] -> ranks[d-1]
    std::map<std::tuple<int, long, int, long>, std::vector<std::pair<long, Int>>> mul;

    long rank_at(int d) const { return d >= 1 && d <= maxdeg ? ranks[d] : 0; }
};

/* The exterior algebra on one degree-1 generator, homology of the circle. */
GradedAlgebra exterior_circle(int maxdeg);

/* Reduced bar construction with the shuffle product, truncated above
 * maxdeg.  Letters are reduced basis elements; a word [a_1|...|a_s] sits in
 * degree s + sum |a_i|. */
GradedAlgebra bar(const GradedAlgebra& a, int maxdeg);

/* H_i of the underlying chain complex. */
FgAbGroup bar_homology(const GradedAlgebra& a, int i);

/* Sanity of a constructed algebra: d o d = 0 and d is a derivation for the
 * product, both checked degreewise through maxdeg.  Throws on violation. */
void check_dga(const GradedAlgebra& a);

/* H^i of the third Eilenberg-MacLane space of the integers, through the
 * double bar of the circle algebra and universal coefficients. */
FgAbGroup kz3_cohomology_oracle(int i);

/* H_i for the double-bar stage itself (second Eilenberg-MacLane space),
 * exposed so tests can pin the even-degree pattern. */
FgAbGroup kz2_homology_oracle(int i);

}  // namespace binring::oracles
