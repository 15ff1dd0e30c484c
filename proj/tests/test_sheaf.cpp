#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "binring/binomial.hpp"
#include "binring/cell_complex.hpp"
#include "binring/em.hpp"
#include "binring/errors.hpp"
#include "binring/linalg.hpp"
#include "binring/sheaf.hpp"

using namespace binring;

namespace {

FgAbGroup grp(long free_rank, std::vector<long> fs) {
    FgAbGroup g;
    g.free_rank = free_rank;
    for (long f : fs) g.factors.push_back(Int(f));
    return g;
}

template <typename F>
std::string error_code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

IntMatrix minus_one() { return IntMatrix::from_dense({{-1}}); }

/* Random primitive vector of the given length. */
std::vector<Int> random_primitive(std::mt19937& rng, int n) {
    std::uniform_int_distribution<int> small(-4, 4);
    while (true) {
        std::vector<Int> v(n);
        for (auto& x : v) x = small(rng);
        Int g(0);
        for (const Int& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) return v;
    }
}

/* Random pointed map (V, v) -> (W, w): w . lambda0^T plus noise through a
 * basis of the annihilator of v, so that f v = w exactly. */
IntMatrix random_pointed_map(std::mt19937& rng, const CoaugStalk& src, const CoaugStalk& tgt) {
    std::uniform_int_distribution<int> small(-3, 3);
    std::vector<IntMatrix::Entry> ents;
    for (int r = 0; r < tgt.ambient; ++r)
        for (int c = 0; c < src.ambient; ++c)
            if (tgt.v[r] != 0 && src.base[c] != 0) ents.push_back({r, c, tgt.v[r] * src.base[c]});
    IntMatrix f = IntMatrix::from_triplets(tgt.ambient, src.ambient, ents);
    std::vector<std::vector<long>> noise(tgt.ambient, std::vector<long>(src.rank));
    for (auto& row : noise)
        for (auto& x : row) x = small(rng);
    return f + IntMatrix::from_dense(noise) * src.basis.transpose();
}

FgAbGroup hyper_lambda_sum(const CellularLatticeSheaf& l, int i) {
    std::vector<FgAbGroup> parts;
    for (int k = 0; k <= i; ++k) {
        if (i - k > l.base.top_dim()) continue;
        parts.push_back(sheaf_cohomology(exterior_power_sheaf(l, k), i - k));
    }
    return direct_sum_groups(parts);
}

std::vector<Int> euler_cochain(long k) { return {Int(k), Int(0), Int(0), Int(0)}; }

}  // namespace

TEST_SUITE("sheaf") {
    TEST_CASE("cell complexes validate on construction") {
        CHECK(CellComplex::point().cell_count() == 1);
        CHECK(CellComplex::circle(3).cell_count() == 6);
        CHECK(CellComplex::circle(4).cell_count() == 8);
        CellComplex s2 = CellComplex::sphere2();
        CHECK(s2.cell_count() == 14);
        CHECK(s2.cells_of_dim(0).size() == 4);
        CHECK(s2.cells_of_dim(1).size() == 6);
        CHECK(s2.cells_of_dim(2).size() == 4);
        CHECK(CellComplex::ball3().cell_count() == 15);
        CHECK((s2.coboundary(1) * s2.coboundary(0)).is_zero());

        /* A filled triangle with one boundary sign flipped no longer
         * squares to zero. */
        auto broken = [] {
            CellComplex({0, 0, 0, 1, 1, 1, 2}, {{0, 3, -1},
                                                {1, 3, 1},
                                                {1, 4, -1},
                                                {2, 4, 1},
                                                {0, 5, -1},
                                                {2, 5, 1},
                                                {3, 6, 1},
                                                {4, 6, 1},
                                                {5, 6, 1}});
        };
        CHECK(error_code_of(broken) == "rank-mismatch");
        CHECK(error_code_of([] { CellComplex::circle(2); }) == "rank-mismatch");
    }

    TEST_CASE("sheaf cohomology of constant and twisted coefficients") {
        CellComplex pt = CellComplex::point();
        CHECK(sheaf_cohomology(constant_sheaf(pt, 1), 0) == grp(1, {}));

        for (int n : {3, 4, 5}) {
            CellularLatticeSheaf c1 = constant_sheaf(CellComplex::circle(n), 1);
            CHECK(sheaf_cohomology(c1, 0) == grp(1, {}));
            CHECK(sheaf_cohomology(c1, 1) == grp(1, {}));
            CHECK(sheaf_cohomology(c1, 2) == grp(0, {}));

            CellularLatticeSheaf tw = circle_local_system(n, minus_one());
            CHECK(sheaf_cohomology(tw, 0) == grp(0, {}));
            CHECK(sheaf_cohomology(tw, 1) == grp(0, {2}));
        }

        CellularLatticeSheaf r2 = constant_sheaf(CellComplex::circle(3), 2);
        CHECK(sheaf_cohomology(r2, 0) == grp(2, {}));
        CHECK(sheaf_cohomology(r2, 1) == grp(2, {}));

        CellularLatticeSheaf s2 = constant_sheaf(CellComplex::sphere2(), 1);
        CHECK(sheaf_cohomology(s2, 0) == grp(1, {}));
        CHECK(sheaf_cohomology(s2, 1) == grp(0, {}));
        CHECK(sheaf_cohomology(s2, 2) == grp(1, {}));

        /* Mod-3 monodromy: multiplication by 2 is not invertible over Z. */
        CHECK(error_code_of([] { circle_local_system(3, IntMatrix::from_dense({{2}})); }) ==
              "rank-mismatch");
        CHECK(error_code_of([&] { sheaf_cohomology(s2, -1); }) == "degree-out-of-range");
        CHECK(sheaf_cohomology(s2, 5) == grp(0, {}));
    }

    TEST_CASE("functoriality of restrictions is enforced") {
        CellularLatticeSheaf f = constant_sheaf(CellComplex::sphere2(), 1);
        f.validate();
        /* Perturb one vertex->edge restriction: some vertex-edge-face flag
         * now composes differently through its two edges. */
        f.rest[0] = IntMatrix::from_dense({{2}});
        CHECK(error_code_of([&] { f.validate(); }) == "sheaf-not-functorial");
    }

    TEST_CASE("coaugmented stalks over the standard pointings") {
        CHECK(coaug_bin_stalk({Int(1)}, 5).size() == 1);
        for (int t = 0; t <= 4; ++t)
            CHECK(coaug_bin_stalk({Int(1), Int(0)}, t).size() == t + 1);
        CHECK(coaug_bin_stalk({Int(1), Int(2)}, 1).size() == 2);
        CHECK(coaug_bin_stalk({Int(3), Int(5)}, 2).size() == 3);

        CHECK(error_code_of([] { coaug_bin_stalk({Int(2), Int(4)}, 1); }) ==
              "pointing-not-primitive");
        CHECK(error_code_of([] { coaug_bin_stalk({Int(0), Int(0)}, 1); }) ==
              "pointing-not-primitive");
        CHECK(error_code_of([] { coaug_bin_stalk({Int(1)}, -1); }) == "degree-out-of-range");
    }

    TEST_CASE("coaugmented induced maps compose functorially") {
        std::mt19937 rng(511);
        for (int round = 0; round < 40; ++round) {
            int t = 1 + round % 3;
            int na = 2 + round % 2, nb = 2 + (round / 2) % 2, nc = 2;
            CoaugStalk a = coaug_bin_stalk(random_primitive(rng, na), t);
            CoaugStalk b = coaug_bin_stalk(random_primitive(rng, nb), t);
            CoaugStalk c = coaug_bin_stalk(random_primitive(rng, nc), t);
            IntMatrix f = random_pointed_map(rng, a, b);
            IntMatrix g = random_pointed_map(rng, b, c);
            CHECK(coaug_induced(a, c, g * f) == coaug_induced(b, c, g) * coaug_induced(a, b, f));
        }
        /* Identity map, identical presentations. */
        CoaugStalk s = coaug_bin_stalk({Int(1), Int(0), Int(0)}, 2);
        CHECK(coaug_induced(s, s, IntMatrix::identity(3)) ==
              IntMatrix::identity((int)s.size()));
    }

    TEST_CASE("split pointings recover the truncated binomial algebra") {
        /* (Z + V, (1, 0)): the coset is naturally V^dual, so the stalk has
         * the size of Bin^{<=t}(V) and transition matrices of block maps
         * id + f match induced_map(f). */
        std::mt19937 rng(902);
        std::uniform_int_distribution<int> small(-3, 3);
        for (int t = 1; t <= 3; ++t)
            for (int r = 1; r <= 2; ++r) {
                std::vector<Int> v(r + 1, Int(0));
                v[0] = 1;
                CoaugStalk st = coaug_bin_stalk(v, t);
                TruncatedBinAlgebra bin(r, t);
                CHECK(st.size() == bin.size());

                std::vector<std::vector<long>> fd(r, std::vector<long>(r));
                for (auto& row : fd)
                    for (auto& x : row) x = small(rng);
                IntMatrix f = IntMatrix::from_dense(fd);
                std::vector<IntMatrix::Entry> ents = {{0, 0, Int(1)}};
                for (const auto& en : f.entries()) ents.push_back({en.r + 1, en.c + 1, en.v});
                IntMatrix block = IntMatrix::from_triplets(r + 1, r + 1, ents);
                IntMatrix lifted = coaug_induced(st, st, block);
                IntMatrix plain = induced_map(f, t);
                /* Both bases are graded-lex over the same variable count:
                 * the matrices agree up to the sign conventions hidden in
                 * the kernel basis, so compare through group data of the
                 * difference being zero after conjugation is overkill --
                 * the saturated kernel basis of (1,0,..,0) is the identity
                 * on the tail coordinates, so they agree on the nose. */
                CHECK(lifted == plain);
            }
    }

    TEST_CASE("pointed sheaf complexes validate their stalk structure") {
        CellComplex pt = CellComplex::point();
        PointedSheafComplex e = split_model(pt, constant_sheaf(pt, 2));
        e.validate();

        PointedSheafComplex imprimitive = e;
        imprimitive.pointing[0] = {Int(2)};
        CHECK(error_code_of([&] { imprimitive.validate(); }) == "pointing-not-primitive");

        /* d = 0 out of a rank-2 source: the kernel is a plane, not a line. */
        PointedSheafComplex plane;
        plane.e0 = constant_sheaf(pt, 2);
        plane.e1 = constant_sheaf(pt, 1);
        plane.d = {IntMatrix(1, 2)};
        plane.pointing = {{Int(1), Int(0)}};
        CHECK(error_code_of([&] { plane.validate(); }) == "pointing-not-primitive");

        /* Pointing outside the kernel. */
        PointedSheafComplex off;
        off.e0 = constant_sheaf(pt, 2);
        off.e1 = constant_sheaf(pt, 1);
        off.d = {IntMatrix::from_dense({{0, 1}})};
        off.pointing = {{Int(0), Int(1)}};
        CHECK(error_code_of([&] { off.validate(); }) == "pointing-not-primitive");
    }

    TEST_CASE("point base gives the exterior algebra and matches the circle tower") {
        CellComplex pt = CellComplex::point();
        for (int r = 1; r <= 2; ++r) {
            PointedSheafComplex e = split_model(pt, constant_sheaf(pt, r));
            for (int i = 0; i <= 3; ++i) {
                Int lam;
                mpz_bin_uiui(lam.get_mpz_t(), (unsigned long)r, (unsigned long)i);
                for (int t = std::max(i, 1); t <= 3; ++t) {
                    FgAbGroup h = pushforward_cohomology(e, t, i);
                    CHECK(h == grp(lam.get_si(), {}));
                    CHECK(h == truncated_bin_cohomology(dual_complex_of_group(grp(r, {}), 1), t, i));
                }
            }
        }
    }

    TEST_CASE("torus and klein bottle over the circle") {
        for (int n : {3, 4}) {
            CellComplex s1 = CellComplex::circle(n);
            PointedSheafComplex torus = split_model(s1, constant_sheaf(s1, 1));
            CHECK(pushforward_cohomology(torus, 1, 0) == grp(1, {}));
            CHECK(pushforward_cohomology(torus, 1, 1) == grp(2, {}));
            CHECK(pushforward_cohomology(torus, 2, 2) == grp(1, {}));
            CHECK(pushforward_cohomology(torus, 2, 3) == grp(0, {}));

            PointedSheafComplex klein = split_model(s1, circle_local_system(n, minus_one()));
            CHECK(pushforward_cohomology(klein, 1, 0) == grp(1, {}));
            CHECK(pushforward_cohomology(klein, 1, 1) == grp(1, {}));
            CHECK(pushforward_cohomology(klein, 2, 2) == grp(0, {2}));
            CHECK(pushforward_cohomology(klein, 2, 3) == grp(0, {}));
        }
    }

    TEST_CASE("graded pieces of split inputs sum to the exterior hypercohomology") {
        std::vector<CellularLatticeSheaf> systems;
        systems.push_back(circle_local_system(3, minus_one()));
        systems.push_back(constant_sheaf(CellComplex::circle(3), 2));
        systems.push_back(circle_local_system(3, IntMatrix::from_dense({{-1, 0}, {0, 1}})));
        systems.push_back(circle_local_system(4, IntMatrix::from_dense({{0, 1}, {1, 0}})));
        for (const auto& l : systems) {
            PointedSheafComplex e = split_model(l.base, l);
            for (int i = 0; i <= 3; ++i)
                CHECK(pushforward_cohomology(e, std::max(i, 1), i) == hyper_lambda_sum(l, i));
        }
    }

    TEST_CASE("circle bundles over the sphere realize the euler class") {
        CellComplex s2 = CellComplex::sphere2();
        PointedSheafComplex split = split_model(s2, constant_sheaf(s2, 1));
        PointedSheafComplex flat = circle_bundle_model(s2, euler_cochain(0));
        for (int i = 0; i <= 3; ++i) {
            FgAbGroup h = pushforward_cohomology(flat, std::max(i, 1), i);
            CHECK(h == pushforward_cohomology(split, std::max(i, 1), i));
            CHECK(h == grp(1, {}));  // S^2 x S^1
        }

        PointedSheafComplex hopf = circle_bundle_model(s2, euler_cochain(1));
        CHECK(pushforward_cohomology(hopf, 1, 0) == grp(1, {}));
        CHECK(pushforward_cohomology(hopf, 1, 1) == grp(0, {}));
        CHECK(pushforward_cohomology(hopf, 2, 2) == grp(0, {}));
        CHECK(pushforward_cohomology(hopf, 3, 3) == grp(1, {}));

        for (long k : {2L, 3L}) {
            PointedSheafComplex lens = circle_bundle_model(s2, euler_cochain(k));
            CHECK(pushforward_cohomology(lens, 1, 0) == grp(1, {}));
            CHECK(pushforward_cohomology(lens, 1, 1) == grp(0, {}));
            CHECK(pushforward_cohomology(lens, 2, 2) == grp(0, {k}));
            CHECK(pushforward_cohomology(lens, 3, 3) == grp(1, {}));
        }
    }

    TEST_CASE("cohomologous euler cocycles give equal outputs") {
        CellComplex s2 = CellComplex::sphere2();
        /* kappa' = kappa + coboundary(eta) for a 1-cochain eta. */
        std::vector<Int> eta = {Int(1), Int(-2), Int(0), Int(1), Int(0), Int(3)};
        std::vector<Int> moved = euler_cochain(2);
        std::vector<Int> delta = s2.coboundary(1).apply(eta);
        for (size_t i = 0; i < moved.size(); ++i) moved[i] += delta[i];

        PointedSheafComplex a = circle_bundle_model(s2, euler_cochain(2));
        PointedSheafComplex b = circle_bundle_model(s2, moved);
        for (int i = 0; i <= 3; ++i)
            CHECK(pushforward_cohomology(a, std::max(i, 1), i) ==
                  pushforward_cohomology(b, std::max(i, 1), i));
    }

    TEST_CASE("non-cocycles and unstable truncations are rejected") {
        CellComplex b3 = CellComplex::ball3();
        std::vector<Int> not_closed = {Int(1), Int(0), Int(0), Int(0)};
        CHECK(error_code_of([&] { circle_bundle_model(b3, not_closed); }) == "not-a-cocycle");

        CellComplex s1 = CellComplex::circle(3);
        PointedSheafComplex klein = split_model(s1, circle_local_system(3, minus_one()));
        CHECK(error_code_of([&] { pushforward_cohomology(klein, 0, 2); }) ==
              "truncation-unstable");
        CHECK(error_code_of([&] { pushforward_cohomology(klein, 1, -1); }) ==
              "degree-out-of-range");
        CHECK(error_code_of([&] { pushforward_cohomology(klein, -1, 1); }) ==
              "degree-out-of-range");
    }
}
