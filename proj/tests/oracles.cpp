#include "oracles.hpp"

#include <algorithm>

#include "binring/errors.hpp"

namespace binring::oracles {

namespace {

LatticeCochainComplex make_complex(std::vector<long> ranks, std::vector<IntMatrix> diffs) {
    LatticeCochainComplex c;
    c.lo = 0;
    c.ranks = std::move(ranks);
    c.diffs = std::move(diffs);
    c.validate();
    return c;
}

IntMatrix one_by_one(long v) { return IntMatrix::from_dense({{v}}); }

}  // namespace

LatticeCochainComplex cp3_complex() {
    std::vector<long> ranks = {1, 0, 1, 0, 1, 0, 1};
    std::vector<IntMatrix> diffs;
    for (size_t i = 0; i + 1 < ranks.size(); ++i)
        diffs.push_back(IntMatrix((int)ranks[i + 1], (int)ranks[i]));
    return make_complex(std::move(ranks), std::move(diffs));
}

LatticeCochainComplex rp_infty_skeleton(int top) {
    std::vector<long> ranks(top + 1, 1);
    std::vector<IntMatrix> diffs;
    for (int d = 0; d < top; ++d) diffs.push_back(one_by_one(d % 2 == 0 ? 0 : 2));
    return make_complex(std::move(ranks), std::move(diffs));
}

LatticeCochainComplex s2_x_s1_complex() {
    std::vector<long> ranks = {1, 1, 1, 1};
    std::vector<IntMatrix> diffs = {one_by_one(0), one_by_one(0), one_by_one(0)};
    return make_complex(std::move(ranks), std::move(diffs));
}

LatticeCochainComplex s3_complex() {
    std::vector<long> ranks = {1, 0, 0, 1};
    std::vector<IntMatrix> diffs = {IntMatrix(0, 1), IntMatrix(0, 0), IntMatrix(1, 0)};
    return make_complex(std::move(ranks), std::move(diffs));
}

LatticeCochainComplex lens_complex(int k) {
    if (k < 2) fail("degree-out-of-range", "lens space needs k >= 2");
    std::vector<long> ranks = {1, 1, 1, 1};
    std::vector<IntMatrix> diffs = {one_by_one(0), one_by_one(k), one_by_one(0)};
    return make_complex(std::move(ranks), std::move(diffs));
}

LatticeCochainComplex torus2_complex() {
    std::vector<long> ranks = {1, 2, 1};
    std::vector<IntMatrix> diffs = {IntMatrix(2, 1), IntMatrix(1, 2)};
    return make_complex(std::move(ranks), std::move(diffs));
}

LatticeCochainComplex klein_complex() {
    std::vector<long> ranks = {1, 2, 1};
    IntMatrix d1 = IntMatrix::from_triplets(1, 2, {{0, 0, 2}});
    std::vector<IntMatrix> diffs = {IntMatrix(2, 1), d1};
    return make_complex(std::move(ranks), std::move(diffs));
}

FgAbGroup complex_h(const LatticeCochainComplex& c, int i) {
    if (i > c.hi()) return FgAbGroup{};
    return complex_cohomology(c, i);
}

/* ---- Iterated bar construction --------------------------------------- */

GradedAlgebra exterior_circle(int maxdeg) {
    GradedAlgebra a;
    a.maxdeg = maxdeg;
    a.ranks.assign(maxdeg + 1, 0);
    a.ranks[1] = 1;
    a.diff.assign(maxdeg + 1, IntMatrix(0, 0));
    a.diff[1] = IntMatrix(0, 1);
    for (int d = 2; d <= maxdeg; ++d) a.diff[d] = IntMatrix((int)a.ranks[d - 1], (int)a.ranks[d]);
    /* x * x = 0: the empty expansion. */
    a.mul[{1, 0, 1, 0}] = {};
    return a;
}

namespace {

/* A word is a list of letters (degree, basis index); its bar degree is the
 * letter count plus the letter degrees. */
using Word = std::vector<std::pair<int, long>>;

struct WordBasis {
    std::vector<std::vector<Word>> by_degree;
    std::map<Word, long> position;

    void enumerate(const GradedAlgebra& a, int maxdeg) {
        by_degree.assign(maxdeg + 1, {});
        Word w;
        extend(a, maxdeg, w, 0);
        for (auto& words : by_degree) std::sort(words.begin(), words.end());
        for (int d = 0; d <= maxdeg; ++d)
            for (long i = 0; i < (long)by_degree[d].size(); ++i)
                position[by_degree[d][i]] = i;
    }

    void extend(const GradedAlgebra& a, int maxdeg, Word& w, int deg) {
        if (!w.empty()) by_degree[deg].push_back(w);
        for (int ld = 1; deg + ld + 1 <= maxdeg; ++ld) {
            for (long li = 0; li < a.rank_at(ld); ++li) {
                w.emplace_back(ld, li);
                extend(a, maxdeg, w, deg + ld + 1);
                w.pop_back();
            }
        }
    }
};

/* Sparse element of the bar construction in a fixed degree. */
using BarVec = std::map<Word, Int>;

void add_to(BarVec& acc, const Word& w, const Int& c) {
    if (c == 0) return;
    auto [it, fresh] = acc.emplace(w, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) acc.erase(it);
    }
}

/* d[a_1|...|a_s] as internal terms plus adjacent products, with the sign
 * (-1)^{bar degree of the strict prefix} on each term. */
BarVec word_differential(const GradedAlgebra& a, const Word& w) {
    BarVec out;
    int s = (int)w.size();
    std::vector<int> prefix(s + 1, 0);  // prefix[i] = bar degree of w[0..i)
    for (int i = 0; i < s; ++i) prefix[i + 1] = prefix[i] + w[i].first + 1;
    for (int i = 0; i < s; ++i) {
        const auto& [ld, li] = w[i];
        int sign = prefix[i] % 2 == 0 ? 1 : -1;
        const IntMatrix& dm = a.diff[ld];
        for (const auto& en : dm.entries()) {
            if (en.c != li || ld - 1 < 1) continue;
            Word img = w;
            img[i] = {ld - 1, en.r};
            add_to(out, img, sign * en.v);
        }
    }
    for (int i = 0; i + 1 < s; ++i) {
        int sign = prefix[i + 1] % 2 == 0 ? 1 : -1;
        auto it = a.mul.find({w[i].first, w[i].second, w[i + 1].first, w[i + 1].second});
        if (it == a.mul.end()) continue;
        int pd = w[i].first + w[i + 1].first;
        for (const auto& [pos, c] : it->second) {
            Word img;
            img.reserve(s - 1);
            img.insert(img.end(), w.begin(), w.begin() + i);
            img.emplace_back(pd, pos);
            img.insert(img.end(), w.begin() + i + 2, w.end());
            add_to(out, img, sign * c);
        }
    }
    return out;
}

/* Shuffles of two words with Koszul signs on suspended degrees: taking a
 * right letter past k remaining left letters of suspended degree T flips
 * the sign by (|b|+1) * T. */
void shuffle_into(const Word& l, size_t i, const Word& r, size_t j, Word& cur, int sign,
                  BarVec& out) {
    if (i == l.size() && j == r.size()) {
        add_to(out, cur, sign);
        return;
    }
    if (i < l.size()) {
        cur.push_back(l[i]);
        shuffle_into(l, i + 1, r, j, cur, sign, out);
        cur.pop_back();
    }
    if (j < r.size()) {
        int rest = 0;
        for (size_t k = i; k < l.size(); ++k) rest += l[k].first + 1;
        int flip = ((r[j].first + 1) * rest) % 2 == 0 ? 1 : -1;
        cur.push_back(r[j]);
        shuffle_into(l, i, r, j + 1, cur, sign * flip, out);
        cur.pop_back();
    }
}

BarVec shuffle_product(const Word& a, const Word& b) {
    BarVec out;
    Word cur;
    cur.reserve(a.size() + b.size());
    shuffle_into(a, 0, b, 0, cur, 1, out);
    return out;
}

std::vector<std::pair<long, Int>> to_sparse(const WordBasis& basis, const BarVec& v) {
    std::vector<std::pair<long, Int>> out;
    for (const auto& [w, c] : v) out.emplace_back(basis.position.at(w), c);
    return out;
}

}  // namespace

GradedAlgebra bar(const GradedAlgebra& a, int maxdeg) {
    if (a.maxdeg < maxdeg) fail("degree-out-of-range", "bar input truncated too low");
    WordBasis basis;
    basis.enumerate(a, maxdeg);

    GradedAlgebra b;
    b.maxdeg = maxdeg;
    b.ranks.assign(maxdeg + 1, 0);
    for (int d = 1; d <= maxdeg; ++d) b.ranks[d] = (long)basis.by_degree[d].size();
    b.diff.assign(maxdeg + 1, IntMatrix(0, 0));
    for (int d = 1; d <= maxdeg; ++d) {
        std::vector<IntMatrix::Entry> es;
        for (long col = 0; col < b.ranks[d]; ++col) {
            BarVec dv = word_differential(a, basis.by_degree[d][col]);
            for (const auto& [w, c] : dv)
                es.push_back({(int32_t)basis.position.at(w), (int32_t)col, c});
        }
        b.diff[d] = IntMatrix::from_triplets((int)b.rank_at(d - 1), (int)b.ranks[d],
                                             std::move(es));
    }
    for (int d1 = 1; d1 <= maxdeg; ++d1)
        for (int d2 = 1; d1 + d2 <= maxdeg; ++d2)
            for (long i1 = 0; i1 < b.ranks[d1]; ++i1)
                for (long i2 = 0; i2 < b.ranks[d2]; ++i2) {
                    BarVec p =
                        shuffle_product(basis.by_degree[d1][i1], basis.by_degree[d2][i2]);
                    b.mul[{d1, i1, d2, i2}] = to_sparse(basis, p);
                }
    return b;
}

FgAbGroup bar_homology(const GradedAlgebra& a, int i) {
    if (i == 0) return FgAbGroup{1, {}};
    if (i < 0 || i + 1 > a.maxdeg) fail("degree-out-of-range", "bar homology degree");
    return cohomology_of_pair(a.diff[i + 1], a.diff[i]);
}

void check_dga(const GradedAlgebra& a) {
    for (int d = 2; d <= a.maxdeg; ++d)
        if (!(a.diff[d - 1] * a.diff[d]).is_zero())
            fail("rank-mismatch", "bar differential does not square to zero");

    /* Derivation and associativity, on every stored product. */
    auto mul_vec = [&](int dv, const std::vector<std::pair<long, Int>>& v, int dw, long w,
                       bool right) {
        std::map<long, Int> out;
        int dout = dv + dw;
        if (dout > a.maxdeg) return out;
        for (const auto& [pos, c] : v) {
            auto key = right ? std::make_tuple(dv, pos, dw, w) : std::make_tuple(dw, w, dv, pos);
            auto it = a.mul.find(key);
            if (it == a.mul.end()) continue;
            for (const auto& [p2, c2] : it->second) {
                out[p2] += c * c2;
                if (out[p2] == 0) out.erase(p2);
            }
        }
        return out;
    };
    auto column = [&](const IntMatrix& m, long col) {
        std::vector<std::pair<long, Int>> v;
        for (const auto& en : m.entries())
            if (en.c == col) v.emplace_back(en.r, en.v);
        return v;
    };
    for (const auto& [key, prod] : a.mul) {
        auto [d1, i1, d2, i2] = key;
        if (d1 + d2 + 1 > a.maxdeg) continue;
        /* d(xy) */
        std::map<long, Int> lhs;
        for (const auto& [pos, c] : prod) {
            for (const auto& [p2, c2] : column(a.diff[d1 + d2], pos)) {
                lhs[p2] += c * c2;
                if (lhs[p2] == 0) lhs.erase(p2);
            }
        }
        /* dx * y + (-1)^{d1} x * dy */
        std::map<long, Int> rhs = mul_vec(d1 - 1, column(a.diff[d1], i1), d2, i2, true);
        auto second = mul_vec(d2 - 1, column(a.diff[d2], i2), d1, i1, false);
        for (const auto& [p, c] : second) {
            rhs[p] += d1 % 2 == 0 ? c : -c;
            if (rhs[p] == 0) rhs.erase(p);
        }
        if (lhs != rhs) fail("rank-mismatch", "bar differential is not a derivation");
    }
    for (const auto& [key, prod] : a.mul) {
        auto [d1, i1, d2, i2] = key;
        for (int d3 = 1; d1 + d2 + d3 <= a.maxdeg; ++d3)
            for (long i3 = 0; i3 < a.rank_at(d3); ++i3) {
                auto left = mul_vec(d1 + d2, prod, d3, i3, true);
                auto it23 = a.mul.find({d2, i2, d3, i3});
                std::map<long, Int> right;
                if (it23 != a.mul.end())
                    right = mul_vec(d2 + d3, it23->second, d1, i1, false);
                if (left != right) fail("rank-mismatch", "bar product is not associative");
            }
    }
}

namespace {

const GradedAlgebra& stage_two() {
    static const GradedAlgebra g = bar(exterior_circle(9), 9);
    return g;
}

const GradedAlgebra& stage_three() {
    static const GradedAlgebra g = bar(stage_two(), 8);
    return g;
}

}  // namespace

FgAbGroup kz2_homology_oracle(int i) { return bar_homology(stage_two(), i); }

FgAbGroup kz3_cohomology_oracle(int i) {
    if (i == 0) return FgAbGroup{1, {}};
    /* Universal coefficients: free part from H_i, torsion from H_{i-1}. */
    FgAbGroup hi = bar_homology(stage_three(), i);
    FgAbGroup hprev = bar_homology(stage_three(), i - 1);
    return FgAbGroup{hi.free_rank, hprev.factors};
}

}  // namespace binring::oracles
