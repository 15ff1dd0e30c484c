#include <doctest.h>

#include <random>

#include "binring/linalg.hpp"

using namespace binring;

namespace {

IntMatrix dense(const std::vector<std::vector<long>>& d) { return IntMatrix::from_dense(d); }

/* U * M * V against the diagonal embedded in a rows x cols frame. */
void check_transforms(const IntMatrix& m) {
    auto s = smith_normal_form(m, true);
    REQUIRE(s.u.has_value());
    REQUIRE(s.v.has_value());
    IntMatrix d = IntMatrix::diagonal(m.rows(), m.cols(), s.diag);
    CHECK((*s.u * m * *s.v) == d);
    if (m.rows() > 0) {
        IntMatrix du = exterior_power(*s.u, m.rows());
        CHECK(du.at(0, 0) * du.at(0, 0) == 1);
    }
    if (m.cols() > 0) {
        IntMatrix dv = exterior_power(*s.v, m.cols());
        CHECK(dv.at(0, 0) * dv.at(0, 0) == 1);
    }
    for (size_t i = 0; i + 1 < s.diag.size(); ++i) {
        CHECK(s.diag[i] > 0);
        CHECK(s.diag[i + 1] % s.diag[i] == 0);
    }
}

IntMatrix random_sparse(std::mt19937& rng, int nr, int nc, double density, int lo = -4,
                        int hi = 4) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> val(lo, hi);
    std::vector<IntMatrix::Entry> ents;
    for (int r = 0; r < nr; ++r)
        for (int c = 0; c < nc; ++c)
            if (coin(rng) < density) {
                int v = val(rng);
                if (v != 0) ents.push_back({r, c, Int(v)});
            }
    return IntMatrix::from_triplets(nr, nc, std::move(ents));
}

/* Random product of elementary row (or column) operations applied in place,
 * mirrored inversely on a partner so the pair stays a complex. */
void shear_rows(std::mt19937& rng, IntMatrix& m, IntMatrix* partner_cols, int steps) {
    std::uniform_int_distribution<int> qd(-2, 2);
    if (m.rows() < 2) return;
    std::uniform_int_distribution<int> rd(0, m.rows() - 1);
    auto dm = m.to_dense();
    std::vector<std::vector<Int>> dp;
    if (partner_cols) dp = partner_cols->to_dense();
    for (int s = 0; s < steps; ++s) {
        int i = rd(rng), j = rd(rng);
        if (i == j) continue;
        Int q(qd(rng));
        for (int c = 0; c < m.cols(); ++c) dm[i][c] += q * dm[j][c];
        if (partner_cols)
            for (int r = 0; r < partner_cols->rows(); ++r) dp[r][j] -= q * dp[r][i];
    }
    std::vector<IntMatrix::Entry> ents;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (dm[r][c] != 0) ents.push_back({r, c, dm[r][c]});
    m = IntMatrix::from_triplets(m.rows(), m.cols(), std::move(ents));
    if (partner_cols) {
        std::vector<IntMatrix::Entry> pents;
        for (int r = 0; r < partner_cols->rows(); ++r)
            for (int c = 0; c < partner_cols->cols(); ++c)
                if (dp[r][c] != 0) pents.push_back({r, c, dp[r][c]});
        *partner_cols = IntMatrix::from_triplets(partner_cols->rows(), partner_cols->cols(),
                                                 std::move(pents));
    }
}

struct KnownComplex {
    IntMatrix d0, d1;
    FgAbGroup h;
};

/* Z^a -> Z^mid -> Z^c with known middle cohomology, disguised by random
 * unimodular changes of basis on all three lattices. */
KnownComplex random_complex(std::mt19937& rng, int a, int mid, int c) {
    std::uniform_int_distribution<int> r0d(0, std::min(a, mid));
    int r0 = r0d(rng);
    std::uniform_int_distribution<int> r1d(0, std::min(c, mid - r0));
    int r1 = r1d(rng);
    int f = mid - r0 - r1;

    std::uniform_int_distribution<int> dval(1, 6);
    KnownComplex k;
    k.h.free_rank = f;
    std::vector<IntMatrix::Entry> e0, e1;
    std::vector<Int> ds;
    for (int i = 0; i < r0; ++i) {
        Int d(dval(rng));
        ds.push_back(d);
        e0.push_back({i, i, d});
    }
    for (int j = 0; j < r1; ++j) e1.push_back({j, r0 + f + j, Int(1)});
    k.d0 = IntMatrix::from_triplets(mid, a, std::move(e0));
    k.d1 = IntMatrix::from_triplets(c, mid, std::move(e1));

    /* Invariant factors of the diagonal give the expected torsion. */
    auto snf = smith_normal_form(IntMatrix::diagonal(r0, r0, ds), false);
    for (auto& d : snf.diag)
        if (d > 1) k.h.factors.push_back(d);

    shear_rows(rng, k.d0, &k.d1, 4 * mid);  // middle basis, mirrored on d1
    shear_rows(rng, k.d1, nullptr, 2 * c);  // target basis of d1
    IntMatrix d0t = k.d0.transpose();
    shear_rows(rng, d0t, nullptr, 2 * a);  // source basis of d0
    k.d0 = d0t.transpose();
    return k;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("smith normal form on a fixed 2x2") {
    auto s = smith_normal_form(dense({{2, 4}, {6, 8}}), false);
    REQUIRE(s.diag.size() == 2);
    CHECK(s.diag[0] == 2);
    CHECK(s.diag[1] == 4);
    check_transforms(dense({{2, 4}, {6, 8}}));
}

TEST_CASE("smith normal form merges coprime factors") {
    auto s = smith_normal_form(IntMatrix::diagonal(2, 2, {Int(2), Int(3)}), false);
    REQUIRE(s.diag.size() == 2);
    CHECK(s.diag[0] == 1);
    CHECK(s.diag[1] == 6);

    auto g = cokernel_structure(IntMatrix::diagonal(2, 2, {Int(2), Int(3)}));
    CHECK(g.free_rank == 0);
    REQUIRE(g.factors.size() == 1);
    CHECK(g.factors[0] == 6);
    CHECK(g.to_string() == "Z/6");
    CHECK(g.order() == 6);
}

TEST_CASE("smith normal form of rectangular and degenerate shapes") {
    auto s = smith_normal_form(dense({{0, 0, 0}, {0, 0, 0}}), false);
    CHECK(s.diag.empty());
    check_transforms(dense({{0, 0, 0}, {0, 0, 0}}));
    check_transforms(IntMatrix(0, 3));
    check_transforms(IntMatrix(3, 0));
    check_transforms(dense({{6, 10, 15}}));
    auto t = smith_normal_form(dense({{6, 10, 15}}), false);
    REQUIRE(t.diag.size() == 1);
    CHECK(t.diag[0] == 1);
}

TEST_CASE("smith transforms on random matrices") {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 40; ++trial) {
        int nr = 1 + (int)(rng() % 8), nc = 1 + (int)(rng() % 8);
        IntMatrix m = random_sparse(rng, nr, nc, 0.55);
        check_transforms(m);
        auto s = smith_normal_form(m, false);
        CHECK((long)s.diag.size() == rank(m));
        CHECK(rank(m.transpose()) == rank(m));
        /* Idempotence: the diagonal matrix is its own Smith form. */
        auto s2 = smith_normal_form(
            IntMatrix::diagonal((int)s.diag.size(), (int)s.diag.size(), s.diag), false);
        CHECK(s2.diag == s.diag);
    }
}

TEST_CASE("smith form is invariant under unimodular changes of basis") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        IntMatrix m = random_sparse(rng, 6, 5, 0.5);
        auto base = smith_normal_form(m, false);
        IntMatrix m2 = m;
        shear_rows(rng, m2, nullptr, 25);
        IntMatrix m2t = m2.transpose();
        shear_rows(rng, m2t, nullptr, 25);
        m2 = m2t.transpose();
        auto moved = smith_normal_form(m2, false);
        CHECK(base.diag == moved.diag);
    }
}

TEST_CASE("hermite kernel is a saturated basis of the kernel") {
    std::mt19937 rng(424242);
    for (int trial = 0; trial < 30; ++trial) {
        int nr = 1 + (int)(rng() % 7), nc = 1 + (int)(rng() % 7);
        IntMatrix m = random_sparse(rng, nr, nc, 0.5);
        IntMatrix k = hermite_kernel(m);
        CHECK((m * k).is_zero());
        CHECK(rank(k) == k.cols());
        CHECK(rank(m) + k.cols() == m.cols());
        /* Saturated: the inclusion has all invariant factors equal to 1. */
        auto s = smith_normal_form(k, false);
        for (auto& d : s.diag) CHECK(d == 1);
    }
}

TEST_CASE("solve_columns recovers integral preimages") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        int nr = 1 + (int)(rng() % 6), nc = 1 + (int)(rng() % 6), k = 1 + (int)(rng() % 3);
        IntMatrix a = random_sparse(rng, nr, nc, 0.6);
        IntMatrix x = random_sparse(rng, nc, k, 0.7);
        IntMatrix b = a * x;
        IntMatrix x2 = solve_columns(a, b);
        CHECK(a * x2 == b);
    }
    CHECK_THROWS_WITH_AS(solve_columns(dense({{2}}), dense({{1}})), doctest::Contains("unsolvable"),
                         Error);
    CHECK_THROWS_WITH_AS(solve_columns(dense({{0, 0}}), dense({{3}})),
                         doctest::Contains("unsolvable"), Error);
}

TEST_CASE("cokernel structure reads off presentations") {
    /* Z^2 / <(2,0),(0,3)> = Z/6 handled above; now a rank-deficient one:
     * Z^3 / <(1,1,0),(0,2,2)> has free rank 1 and torsion Z/2. */
    IntMatrix p = dense({{1, 0}, {1, 2}, {0, 2}});
    auto g = cokernel_structure(p);
    CHECK(g.free_rank == 1);
    REQUIRE(g.factors.size() == 1);
    CHECK(g.factors[0] == 2);
    CHECK(g.to_string() == "Z + Z/2");
}

TEST_CASE("group formatting and finiteness") {
    FgAbGroup t;
    CHECK(t.is_trivial());
    CHECK(t.to_string() == "0");
    CHECK(t.order() == 1);
    FgAbGroup z2;
    z2.free_rank = 2;
    z2.factors = {Int(4), Int(12)};
    CHECK(z2.to_string() == "Z^2 + Z/4 + Z/12");
    CHECK_THROWS_WITH_AS(z2.order(), doctest::Contains("not-finite"), Error);
    CHECK_THROWS_WITH_AS(dual_finite_group(z2), doctest::Contains("not-finite"), Error);
    FgAbGroup fin;
    fin.factors = {Int(2), Int(4)};
    CHECK(dual_finite_group(fin) == fin);
    CHECK(fin.order() == 8);
}

TEST_CASE("exterior powers") {
    CHECK(exterior_power(dense({{1, 1}, {0, 1}}), 2) == dense({{1}}));
    CHECK(exterior_power(dense({{2, 0}, {0, 3}}), 2) == dense({{6}}));
    CHECK(exterior_power(dense({{1, 2}, {3, 4}}), 0) == dense({{1}}));
    /* Lambda^2 of a 3x3: minors in lexicographic 2-subset order. */
    IntMatrix f = dense({{1, 2, 0}, {0, 1, 1}, {1, 0, 1}});
    IntMatrix l2 = exterior_power(f, 2);
    REQUIRE(l2.rows() == 3);
    REQUIRE(l2.cols() == 3);
    CHECK(l2.at(0, 0) == 1);   // rows {0,1}, cols {0,1}
    CHECK(l2.at(0, 1) == 1);   // rows {0,1}, cols {0,2}
    CHECK(l2.at(2, 2) == 1);   // rows {1,2}, cols {1,2}: det [[1,1],[0,1]]
    /* Functoriality on squares: Lambda^2(fg) = Lambda^2(f) Lambda^2(g). */
    IntMatrix g = dense({{0, 1, 1}, {1, 1, 0}, {2, 0, 1}});
    CHECK(exterior_power(f * g, 2) == exterior_power(f, 2) * exterior_power(g, 2));
}

TEST_CASE("cochain complex of the square-glued surface") {
    /* One vertex, two loop edges, one face glued along a b a b^-1. */
    LatticeCochainComplex kb;
    kb.lo = 0;
    kb.ranks = {1, 2, 1};
    kb.diffs = {IntMatrix(2, 1), dense({{2, 0}})};
    kb.validate();
    CHECK(complex_cohomology(kb, 0).to_string() == "Z");
    CHECK(complex_cohomology(kb, 1).to_string() == "Z");
    CHECK(complex_cohomology(kb, 2).to_string() == "Z/2");
    CHECK_THROWS_WITH_AS(complex_cohomology(kb, 3), doctest::Contains("degree-out-of-range"),
                         Error);
    CHECK_THROWS_WITH_AS(complex_cohomology(kb, -1), doctest::Contains("degree-out-of-range"),
                         Error);

    CHECK(cohomology_of_pair(kb.diffs[0], kb.diffs[1]).to_string() == "Z");

    /* Same for the orientable gluing a b a^-1 b^-1: middle cohomology Z^2. */
    LatticeCochainComplex t2;
    t2.lo = 0;
    t2.ranks = {1, 2, 1};
    t2.diffs = {IntMatrix(2, 1), IntMatrix(1, 2)};
    t2.validate();
    CHECK(complex_cohomology(t2, 1).to_string() == "Z^2");
    CHECK(complex_cohomology(t2, 2).to_string() == "Z");
}

TEST_CASE("complex validation rejects bad data") {
    LatticeCochainComplex bad;
    bad.lo = 0;
    bad.ranks = {1, 2};
    bad.diffs = {IntMatrix(3, 1)};
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("rank-mismatch"), Error);

    LatticeCochainComplex notcx;
    notcx.lo = 0;
    notcx.ranks = {1, 1, 1};
    notcx.diffs = {dense({{1}}), dense({{1}})};
    CHECK_THROWS_WITH_AS(notcx.validate(), doctest::Contains("rank-mismatch"), Error);
}

TEST_CASE("pair reduction preserves cohomology on random complexes") {
    std::mt19937 rng(20260814);
    for (int trial = 0; trial < 60; ++trial) {
        int a = 1 + (int)(rng() % 6);
        int mid = 1 + (int)(rng() % 8);
        int c = 1 + (int)(rng() % 6);
        KnownComplex k = random_complex(rng, a, mid, c);
        REQUIRE((k.d1 * k.d0).is_zero());

        ReducedPair red = gaussian_reduce_pair(k.d0, k.d1);
        CHECK((red.d1 * red.d0).is_zero());
        CHECK(red.d0.rows() <= k.d0.rows());

        FgAbGroup fast = cohomology_of_pair(k.d0, k.d1);
        CHECK(fast == k.h);

        LatticeCochainComplex cx;
        cx.lo = 0;
        cx.ranks = {k.d0.cols(), k.d0.rows(), k.d1.rows()};
        cx.diffs = {k.d0, k.d1};
        FgAbGroup slow = complex_cohomology(cx, 1);
        CHECK(slow == k.h);
    }
}

TEST_CASE("pair reduction handles unit-free matrices") {
    /* No +-1 entries at all: reduction must be a no-op, fallback still right. */
    IntMatrix d0 = dense({{2, 0}, {0, 3}, {0, 0}});
    IntMatrix d1 = dense({{0, 0, 5}});
    ReducedPair red = gaussian_reduce_pair(d0, d1);
    CHECK(red.d0 == d0);
    CHECK(red.d1 == d1);
    /* Z/2 + Z/3 in invariant-factor form is the single factor Z/6. */
    FgAbGroup h = cohomology_of_pair(d0, d1);
    CHECK(h.free_rank == 0);
    REQUIRE(h.factors.size() == 1);
    CHECK(h.factors[0] == 6);
}

TEST_CASE("big integer growth stays exact") {
    /* Hilbert-like dense integer matrix with large entries. */
    std::vector<std::vector<long>> d(6, std::vector<long>(6));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) d[i][j] = (long)((i + 1) * (i + 1)) * (j + 3) + i * 7919L;
    IntMatrix m = dense(d);
    check_transforms(m);
    auto s = smith_normal_form(m, false);
    CHECK((long)s.diag.size() == rank(m));
}

}  // TEST_SUITE
