#include "binring/em.hpp"

#include <gmpxx.h>

#include "binring/binomial.hpp"
#include "binring/errors.hpp"

namespace binring {

namespace {

void check_factors(const FgAbGroup& a) {
    if (a.free_rank < 0) fail("rank-mismatch", "negative free rank");
    for (const auto& f : a.factors)
        if (f < 1) fail("rank-mismatch", "invariant factors must be positive");
}

/* binom(rank + trunc, trunc): the size of Bin^{<=trunc}(Z^rank). */
Int bin_level_size(long rank, int trunc) {
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), (unsigned long)(rank + trunc), (unsigned long)trunc);
    return r;
}

}  // namespace

void CoconnectiveLatticeComplex::validate() const {
    c.validate();
    if (c.lo < 0) fail("degree-out-of-range", "complex must live in degrees >= 0");
    if (c.lo == 0 && c.ranks.size() >= 2) {
        SmithResult s = smith_normal_form(hermite_kernel(c.diffs[0]));
        for (const auto& d : s.diag)
            if (d != 1) fail("rank-mismatch", "degree-0 cohomology has torsion");
    }
}

CoconnectiveLatticeComplex dual_complex_of_group(const FgAbGroup& a, int n) {
    check_factors(a);
    if (n < 1) fail("connective-range-unsupported", "K(A, n) needs n >= 1");
    long r = a.free_rank;
    long s = (long)a.factors.size();
    CoconnectiveLatticeComplex out;
    out.c.lo = n;
    if (s == 0) {
        out.c.ranks = {r};
        return out;
    }
    out.c.ranks = {r + s, s};
    std::vector<IntMatrix::Entry> es;
    for (long j = 0; j < s; ++j) es.push_back({(int32_t)j, (int32_t)(r + j), a.factors[j]});
    out.c.diffs = {IntMatrix::from_triplets((int)s, (int)(r + s), std::move(es))};
    return out;
}

CoconnectiveLatticeComplex resolution_complex_of_group(const FgAbGroup& a) {
    check_factors(a);
    long r = a.free_rank;
    long s = (long)a.factors.size();
    CoconnectiveLatticeComplex out;
    out.c.lo = 0;
    out.c.ranks = {s, s + r};
    std::vector<IntMatrix::Entry> es;
    for (long j = 0; j < s; ++j) es.push_back({(int32_t)j, (int32_t)j, a.factors[j]});
    out.c.diffs = {IntMatrix::from_triplets((int)(s + r), (int)s, std::move(es))};
    return out;
}

FgAbGroup truncated_bin_cohomology(const CoconnectiveLatticeComplex& cc, int trunc, int degree) {
    if (degree < 0) fail("degree-out-of-range", "negative cohomological degree");
    if (trunc < 0) fail("degree-out-of-range", "negative truncation");
    cc.validate();
    if (fused_path_supported(cc.c, trunc)) return fused_bin_cohomology(cc.c, trunc, degree);

    int levels = degree + 1;
    DoldKanLevels dk = dold_kan_cosimplicial(cc.c, levels);
    Int biggest = 0;
    for (int m = 0; m <= levels; ++m)
        biggest = std::max(biggest, bin_level_size(dk.x.ranks[m], trunc));
    if (biggest > 200000)
        fail("unsupported-size", "literal levelwise pipeline would need " +
                                     biggest.get_str() + " basis functions");
    CosimplicialLattice bx = apply_bin_levelwise(dk.x, trunc);
    bool normalized = biggest > 2000;
    return total_cohomology(bx, degree, normalized);
}

EmResult em_cohomology(const FgAbGroup& a, int n, int i, std::optional<int> trunc) {
    if (n < 1) fail("connective-range-unsupported", "K(A, n) needs n >= 1");
    if (i < 0) fail("degree-out-of-range", "negative cohomological degree");
    check_factors(a);
    CoconnectiveLatticeComplex cc = dual_complex_of_group(a, n);
    if (trunc.has_value()) {
        if (*trunc < 0) fail("degree-out-of-range", "negative truncation");
        return {truncated_bin_cohomology(cc, *trunc, i), *trunc};
    }
    int t = std::max(i, 1);
    FgAbGroup h0 = truncated_bin_cohomology(cc, t, i);
    FgAbGroup h1 = truncated_bin_cohomology(cc, t + 1, i);
    if (!(h0 == h1))
        fail("truncation-unstable", "H^" + std::to_string(i) + " reads " + h0.to_string() +
                                        " at t=" + std::to_string(t) + " but " + h1.to_string() +
                                        " at t=" + std::to_string(t + 1));
    return {h0, t};
}

}  // namespace binring
