#include "binring/torsion.hpp"

#include <gmpxx.h>

#include <vector>

#include "binring/errors.hpp"

namespace binring {

namespace {

void check_finite(const FgAbGroup& a) {
    if (a.free_rank != 0) fail("not-finite", "torsion functors need a finite group");
    if (a.free_rank < 0) fail("rank-mismatch", "negative free rank");
    for (const auto& f : a.factors)
        if (f < 1) fail("rank-mismatch", "invariant factors must be positive");
}

/* Basis of Z[A]: group elements in mixed-radix order, first coordinate
 * fastest.  Multiplication by a group element permutes the basis. */
struct GroupAlgebra {
    std::vector<long> m;       // invariant factors
    std::vector<long> stride;  // mixed-radix strides
    long order = 1;

    explicit GroupAlgebra(const FgAbGroup& a) {
        for (const auto& f : a.factors) {
            if (!f.fits_slong_p()) fail("unsupported-size", "group order too large");
            m.push_back(f.get_si());
        }
        for (long mj : m) {
            stride.push_back(order);
            order *= mj;
        }
    }

    /* v <- [g] * v - v for the j-th standard generator g. */
    void apply_aug_generator(std::vector<Int>& v, size_t j) const {
        std::vector<Int> w(order);
        for (long idx = 0; idx < order; ++idx) {
            long digit = (idx / stride[j]) % m[j];
            long shifted = digit + 1 == m[j] ? idx - (m[j] - 1) * stride[j] : idx + stride[j];
            w[shifted] = v[idx];
        }
        for (long idx = 0; idx < order; ++idx) w[idx] -= v[idx];
        v.swap(w);
    }
};

}  // namespace

FgAbGroup psi(const FgAbGroup& a, int t) {
    if (t < 0) fail("degree-out-of-range", "negative filtration index");
    check_finite(a);
    GroupAlgebra ga(a);
    size_t k = ga.m.size();

    /* Columns: ([g_{i_1}] - 1) ... ([g_{i_{t+1}}] - 1) [b] over multisets of
     * generators (products commute) and all basis elements b.  These span
     * J^{t+1}: J is generated by the ([g_j] - 1) and the ideal expands
     * integrally over the group basis. */
    std::vector<IntMatrix::Entry> es;
    int32_t col = 0;
    std::vector<size_t> tuple(t + 1, 0);
    bool done = k == 0;
    while (!done) {
        for (long b = 0; b < ga.order; ++b) {
            std::vector<Int> v(ga.order);
            v[b] = 1;
            for (size_t idx : tuple) ga.apply_aug_generator(v, idx);
            for (long r = 0; r < ga.order; ++r)
                if (v[r] != 0) es.push_back({(int32_t)r, col, v[r]});
            ++col;
        }
        /* next non-decreasing tuple */
        int pos = t;
        while (pos >= 0 && tuple[pos] == k - 1) --pos;
        if (pos < 0) break;
        size_t next = tuple[pos] + 1;
        for (int q = pos; q <= t; ++q) tuple[q] = next;
    }

    FgAbGroup out = cokernel_structure(
        IntMatrix::from_triplets((int)ga.order, col, std::move(es)));
    if (out.free_rank != 1)
        fail("rank-mismatch", "augmentation quotient lost its free line");
    return out;
}

FgAbGroup phi(const FgAbGroup& a, int t) {
    FgAbGroup p = psi(a, t);
    FgAbGroup torsion{0, p.factors};
    return dual_finite_group(torsion);
}

FgAbGroup cyclotomic_phi_oracle(const Int& p, int t) {
    if (t < 0) fail("degree-out-of-range", "negative filtration index");
    if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 40) == 0)
        fail("not-prime", p.get_str() + " is not prime");
    if (!p.fits_slong_p()) fail("unsupported-size", "prime too large");
    long pl = p.get_si();
    int n = (int)pl - 1;  // rank of Z[x]/(1 + x + ... + x^{p-1})

    /* Companion matrix of the p-th cyclotomic polynomial, minus identity. */
    std::vector<IntMatrix::Entry> es;
    for (int i = 0; i + 1 < n; ++i) es.push_back({i + 1, i, Int(1)});
    for (int r = 0; r < n; ++r) es.push_back({r, n - 1, Int(-1)});
    for (int d = 0; d < n; ++d) es.push_back({d, d, Int(-1)});
    IntMatrix pi = IntMatrix::from_triplets(n, n, std::move(es));

    IntMatrix power = IntMatrix::identity(n);
    for (int s = 0; s < t; ++s) power = power * pi;
    return cokernel_structure(power);
}

}  // namespace binring
