#include "binring/binomial.hpp"

#include <algorithm>
#include <sstream>

#include "binring/errors.hpp"

namespace binring {

/* ---------------------------------------------------------------- *
 * MultiIndex
 * ---------------------------------------------------------------- */

int MultiIndex::total_degree() const {
    int d = 0;
    for (const auto& [c, k] : e) d += k;
    return d;
}

int MultiIndex::exponent(int coord) const {
    for (const auto& [c, k] : e)
        if (c == coord) return k;
    return 0;
}

MultiIndex MultiIndex::from_dense(const std::vector<int>& dense) {
    MultiIndex m;
    for (int i = 0; i < (int)dense.size(); ++i)
        if (dense[i] != 0) m.e.emplace_back(i, dense[i]);
    return m;
}

std::vector<int> MultiIndex::to_dense(int rank) const {
    std::vector<int> d(rank, 0);
    for (const auto& [c, k] : e) d[c] = k;
    return d;
}

std::string MultiIndex::to_string(int rank) const {
    std::ostringstream out;
    auto d = to_dense(rank);
    for (int i = 0; i < rank; ++i) {
        if (i) out << ',';
        out << d[i];
    }
    return out.str();
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
    int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    /* Lexicographic on dense tuples: walk coordinates ascending; at the
     * first coordinate where the exponents differ, the smaller wins. */
    size_t ia = 0, ib = 0;
    while (ia < a.e.size() && ib < b.e.size()) {
        int ca = a.e[ia].first, cb = b.e[ib].first;
        if (ca < cb) return false;  // a has positive exponent where b has 0
        if (cb < ca) return true;
        if (a.e[ia].second != b.e[ib].second) return a.e[ia].second < b.e[ib].second;
        ++ia, ++ib;
    }
    if (ia < a.e.size()) return false;
    if (ib < b.e.size()) return true;
    return false;
}

bool MultiIndex::operator<(const MultiIndex& o) const { return graded_lex_less(*this, o); }

/* ---------------------------------------------------------------- *
 * TruncatedBinAlgebra
 * ---------------------------------------------------------------- */

namespace {

void enumerate_degree(int rank, int coord, int remaining, std::vector<int>& cur,
                      std::vector<MultiIndex>& out) {
    if (coord == rank - 1) {
        cur[coord] = remaining;
        out.push_back(MultiIndex::from_dense(cur));
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        cur[coord] = k;
        enumerate_degree(rank, coord + 1, remaining - k, cur, out);
    }
}

}  // namespace

TruncatedBinAlgebra::TruncatedBinAlgebra(int rank, int trunc) : rank_(rank), trunc_(trunc) {
    if (rank < 0 || trunc < 0) fail("rank-mismatch", "negative rank or truncation");
    if (rank == 0) {
        basis_.push_back(MultiIndex{});
        return;
    }
    std::vector<int> cur(rank, 0);
    for (int d = 0; d <= trunc; ++d) enumerate_degree(rank, 0, d, cur, basis_);
}

long TruncatedBinAlgebra::position(const MultiIndex& k) const {
    auto it = std::lower_bound(basis_.begin(), basis_.end(), k, graded_lex_less);
    if (it == basis_.end() || !(*it == k)) return -1;
    return it - basis_.begin();
}

/* ---------------------------------------------------------------- *
 * Elements and evaluation
 * ---------------------------------------------------------------- */

Int binom_int(const Int& a, unsigned long k) {
    Int r;
    mpz_bin_ui(r.get_mpz_t(), a.get_mpz_t(), k);
    return r;
}

namespace {

long algebra_size(int rank, int trunc) {
    /* binom(rank + trunc, trunc) */
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), (unsigned long)(rank + trunc), (unsigned long)trunc);
    if (!r.fits_slong_p()) fail("unsupported-size", "basis too large");
    return r.get_si();
}

void check_element(const BinElement& e) {
    if (e.rank < 0 || e.trunc < 0 || (long)e.coords.size() != algebra_size(e.rank, e.trunc))
        fail("rank-mismatch", "element coordinates do not match its parent algebra");
}

}  // namespace

BinElement zero_element(int rank, int trunc) {
    BinElement e;
    e.rank = rank;
    e.trunc = trunc;
    e.coords.assign(algebra_size(rank, trunc), Int(0));
    return e;
}

BinElement basis_element(int rank, int trunc, const MultiIndex& k) {
    TruncatedBinAlgebra alg(rank, trunc);
    long pos = alg.position(k);
    if (pos < 0) fail("rank-mismatch", "index outside the basis");
    BinElement e = zero_element(rank, trunc);
    e.coords[pos] = 1;
    return e;
}

Int evaluate(const BinElement& e, const std::vector<Int>& a) {
    check_element(e);
    if ((int)a.size() != e.rank) fail("rank-mismatch", "evaluation point has wrong rank");
    TruncatedBinAlgebra alg(e.rank, e.trunc);
    Int total = 0;
    for (long i = 0; i < alg.size(); ++i) {
        if (e.coords[i] == 0) continue;
        Int term = e.coords[i];
        for (const auto& [c, k] : alg.index_at(i).e) term *= binom_int(a[c], (unsigned long)k);
        total += term;
    }
    return total;
}

/* ---------------------------------------------------------------- *
 * mahler_expand: finite differences on {0..t}^r plus falsification
 * on {0..t+1}^r.
 * ---------------------------------------------------------------- */

BinElement mahler_expand(const EvalOracle& f, int rank, int trunc) {
    if (rank < 0 || trunc < 0) fail("rank-mismatch", "negative rank or truncation");
    /* Guard the evaluation grid (t+2)^r; the expansion grid is smaller. */
    double grid = 1;
    for (int i = 0; i < rank; ++i) {
        grid *= trunc + 2;
        if (grid > 2e7) fail("unsupported-size", "evaluation grid too large");
    }

    if (rank == 0) {
        BinElement e = zero_element(0, trunc);
        e.coords[0] = f({});
        return e;
    }

    const int w = trunc + 1;
    long npts = 1;
    for (int i = 0; i < rank; ++i) npts *= w;

    /* Tabulate f on {0..t}^r (mixed-radix layout, axis 0 fastest). */
    std::vector<Int> table((size_t)npts);
    std::vector<Int> pt(rank);
    for (long idx = 0; idx < npts; ++idx) {
        long rem = idx;
        for (int i = 0; i < rank; ++i) {
            pt[i] = rem % w;
            rem /= w;
        }
        table[idx] = f(pt);
    }

    /* In-place Newton forward differences along each axis: afterwards the
     * entry at position k holds the coefficient of prod binom(x_i, k_i). */
    long stride = 1;
    for (int axis = 0; axis < rank; ++axis) {
        for (long base = 0; base < npts; ++base) {
            if ((base / stride) % w != 0) continue;  // only line starts
            for (int k = 1; k <= trunc; ++k)
                for (int x = trunc; x >= k; --x)
                    table[base + (long)x * stride] -= table[base + (long)(x - 1) * stride];
        }
        stride *= w;
    }

    /* Collect |k| <= t; coefficients beyond the truncation must vanish. */
    BinElement e = zero_element(rank, trunc);
    TruncatedBinAlgebra alg(rank, trunc);
    std::vector<int> k(rank);
    for (long idx = 0; idx < npts; ++idx) {
        long rem = idx;
        int deg = 0;
        for (int i = 0; i < rank; ++i) {
            k[i] = (int)(rem % w);
            deg += k[i];
            rem /= w;
        }
        if (deg > trunc) {
            if (table[idx] != 0)
                fail("not-polynomial-of-degree-t", "nonzero difference above the truncation");
            continue;
        }
        e.coords[alg.position(MultiIndex::from_dense(k))] = table[idx];
    }

    /* Falsification pass on the enlarged grid {0..t+1}^r. */
    const int wv = trunc + 2;
    long vpts = 1;
    for (int i = 0; i < rank; ++i) vpts *= wv;
    for (long idx = 0; idx < vpts; ++idx) {
        long rem = idx;
        bool inside = true;
        for (int i = 0; i < rank; ++i) {
            pt[i] = rem % wv;
            if (pt[i] == trunc + 1) inside = false;
            rem /= wv;
        }
        if (inside) continue;  // already matched by construction
        if (evaluate(e, pt) != f(pt))
            fail("not-polynomial-of-degree-t", "re-evaluation mismatch on the test grid");
    }
    return e;
}

/* ---------------------------------------------------------------- *
 * Ring and Hopf structure
 * ---------------------------------------------------------------- */

BinElement multiply(const BinElement& a, const BinElement& b) {
    check_element(a);
    check_element(b);
    if (a.rank != b.rank) fail("rank-mismatch", "factors live over different lattices");
    auto oracle = [&](const std::vector<Int>& x) -> Int { return evaluate(a, x) * evaluate(b, x); };
    return mahler_expand(oracle, a.rank, a.trunc + b.trunc);
}

BinTensor comultiply(const BinElement& e) {
    check_element(e);
    const int r = e.rank, t = e.trunc;
    auto oracle = [&](const std::vector<Int>& xy) {
        std::vector<Int> s(r);
        for (int i = 0; i < r; ++i) s[i] = xy[i] + xy[r + i];
        return evaluate(e, s);
    };
    BinElement big = mahler_expand(oracle, 2 * r, t);

    TruncatedBinAlgebra big_alg(2 * r, t), alg(r, t);
    BinTensor out;
    out.rank = r;
    out.trunc = t;
    for (long i = 0; i < big_alg.size(); ++i) {
        if (big.coords[i] == 0) continue;
        std::vector<int> kk = big_alg.index_at(i).to_dense(2 * r);
        std::vector<int> kl(kk.begin(), kk.begin() + r), kr(kk.begin() + r, kk.end());
        out.coords.emplace_back(alg.position(MultiIndex::from_dense(kl)),
                                alg.position(MultiIndex::from_dense(kr)), big.coords[i]);
    }
    std::sort(out.coords.begin(), out.coords.end(),
              [](const auto& x, const auto& y) {
                  return std::tie(std::get<0>(x), std::get<1>(x)) <
                         std::tie(std::get<0>(y), std::get<1>(y));
              });
    return out;
}

std::pair<Int, BinElement> splitting_components(const BinElement& e) {
    check_element(e);
    BinElement red = e;
    Int unit = red.coords[0];  // position 0 is the constant index (0,...,0)
    red.coords[0] = 0;
    return {unit, red};
}

/* ---------------------------------------------------------------- *
 * Expansion engine
 * ---------------------------------------------------------------- */

const std::vector<Int>& rescale_coeffs(ExpandCache& cache, const Int& c, int k) {
    auto key = std::make_pair(c, k);
    auto it = cache.rescale.find(key);
    if (it != cache.rescale.end()) return it->second;
    /* 1-D Mahler table of x |-> binom(c*x, k) on {0..k}. */
    std::vector<Int> a((size_t)k + 1);
    for (int x = 0; x <= k; ++x) a[x] = binom_int(c * x, (unsigned long)k);
    for (int j = 1; j <= k; ++j)
        for (int x = k; x >= j; --x) a[x] -= a[x - 1];
    return cache.rescale.emplace(key, std::move(a)).first->second;
}

const std::vector<Int>& product_coeffs(ExpandCache& cache, int u, int v) {
    auto key = std::make_pair(std::min(u, v), std::max(u, v));
    auto it = cache.product.find(key);
    if (it != cache.product.end()) return it->second;
    int n = key.first + key.second;
    std::vector<Int> a((size_t)n + 1);
    for (int x = 0; x <= n; ++x)
        a[x] = binom_int(x, (unsigned long)u) * binom_int(x, (unsigned long)v);
    for (int j = 1; j <= n; ++j)
        for (int x = n; x >= j; --x) a[x] -= a[x - 1];
    return cache.product.emplace(key, std::move(a)).first->second;
}

namespace {

void add_term(SparsePoly& p, const MultiIndex& k, const Int& c) {
    if (c == 0) return;
    auto [it, fresh] = p.emplace(k, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

/* Merge one pair of terms into `out`, multiplying the basis functions
 * coordinate by coordinate; exponents sharing a variable go through the
 * 1-D structure constants. */
void merge_terms(const MultiIndex& ka, const MultiIndex& kb, const Int& coeff, int trunc,
                 ExpandCache& cache, SparsePoly& out) {
    /* Split into disjoint part and shared-variable pairs. */
    MultiIndex base;
    std::vector<std::pair<int, std::pair<int, int>>> shared;  // (var, (u, v))
    size_t ia = 0, ib = 0;
    while (ia < ka.e.size() || ib < kb.e.size()) {
        if (ib == kb.e.size() || (ia < ka.e.size() && ka.e[ia].first < kb.e[ib].first))
            base.e.push_back(ka.e[ia++]);
        else if (ia == ka.e.size() || kb.e[ib].first < ka.e[ia].first)
            base.e.push_back(kb.e[ib++]);
        else {
            shared.push_back({ka.e[ia].first, {ka.e[ia].second, kb.e[ib].second}});
            ++ia, ++ib;
        }
    }
    if (base.total_degree() > trunc) return;

    /* Expand the shared variables recursively. */
    struct Walker {
        const std::vector<std::pair<int, std::pair<int, int>>>& shared;
        int trunc;
        ExpandCache& cache;
        SparsePoly& out;

        void go(size_t i, MultiIndex cur, int deg, Int c) {
            if (deg > trunc) return;
            if (i == shared.size()) {
                std::sort(cur.e.begin(), cur.e.end());
                add_term(out, cur, c);
                return;
            }
            auto [var, uv] = shared[i];
            const auto& pc = product_coeffs(cache, uv.first, uv.second);
            for (int w = std::max(uv.first, uv.second); w < (int)pc.size(); ++w) {
                if (pc[w] == 0) continue;
                MultiIndex next = cur;
                next.e.emplace_back(var, w);
                go(i + 1, std::move(next), deg + w, c * pc[w]);
            }
        }
    };
    Walker{shared, trunc, cache, out}.go(0, base, base.total_degree(), coeff);
}

}  // namespace

SparsePoly poly_mul(const SparsePoly& a, const SparsePoly& b, int trunc, ExpandCache& cache) {
    SparsePoly out;
    for (const auto& [ka, ca] : a) {
        if (ka.total_degree() > trunc) continue;
        for (const auto& [kb, cb] : b) {
            if (kb.total_degree() > trunc) continue;
            merge_terms(ka, kb, ca * cb, trunc, cache, out);
        }
    }
    return out;
}

SparsePoly expand_affine_binom(const Int& b, const std::vector<std::pair<int, Int>>& linear,
                               int k, int trunc, ExpandCache& cache) {
    /* Vandermonde over the summands, one variable at a time:
     * binom(b + c*x + rest, k) = sum_{i+j=k} R_c(i)-expansion * binom(b + rest, j). */
    SparsePoly acc;
    if (k == 0) {
        add_term(acc, MultiIndex{}, 1);
        return acc;
    }
    struct Walker {
        const Int& b;
        const std::vector<std::pair<int, Int>>& linear;
        int trunc;
        ExpandCache& cache;
        SparsePoly& out;

        void go(size_t i, MultiIndex cur, int deg, int rem, const Int& c) {
            if (deg > trunc) return;
            if (i == linear.size()) {
                Int full = c * binom_int(b, (unsigned long)rem);
                if (full != 0) {
                    std::sort(cur.e.begin(), cur.e.end());
                    add_term(out, cur, full);
                }
                return;
            }
            const auto& [var, cf] = linear[i];
            for (int part = 0; part <= rem; ++part) {
                if (part == 0) {
                    go(i + 1, cur, deg, rem, c);
                    continue;
                }
                const auto& rc = rescale_coeffs(cache, cf, part);
                for (int u = 1; u <= part; ++u) {
                    if (rc[u] == 0) continue;
                    MultiIndex next = cur;
                    next.e.emplace_back(var, u);
                    go(i + 1, std::move(next), deg + u, rem - part, c * rc[u]);
                }
            }
        }
    };
    Walker{b, linear, trunc, cache, acc}.go(0, MultiIndex{}, 0, k, 1);
    return acc;
}

/* ---------------------------------------------------------------- *
 * Functoriality and monad structure
 * ---------------------------------------------------------------- */

IntMatrix induced_map(const IntMatrix& f, int trunc) {
    const int r = f.cols(), s = f.rows();
    TruncatedBinAlgebra src(r, trunc), dst(s, trunc);

    /* Linear forms: basis variable i of the source pulls back to
     * lambda |-> (column i of f) . lambda on the target side. */
    std::vector<std::vector<std::pair<int, Int>>> forms((size_t)r);
    for (const auto& en : f.entries())
        if (en.v != 0) forms[en.c].emplace_back(en.r, en.v);

    ExpandCache cache;
    std::vector<IntMatrix::Entry> trips;
    for (long col = 0; col < src.size(); ++col) {
        SparsePoly acc;
        acc.emplace(MultiIndex{}, 1);
        for (const auto& [var, k] : src.index_at(col).e) {
            SparsePoly factor = expand_affine_binom(0, forms[var], k, trunc, cache);
            acc = poly_mul(acc, factor, trunc, cache);
            if (acc.empty()) break;
        }
        for (const auto& [idx, c] : acc)
            trips.push_back({(int32_t)dst.position(idx), (int32_t)col, c});
    }
    return IntMatrix::from_triplets((int)dst.size(), (int)src.size(), trips);
}

IntMatrix affine_induced_map(const IntMatrix& m, const std::vector<Int>& c, int trunc) {
    const int r = m.rows(), s = m.cols();
    if ((int)c.size() != r) fail("rank-mismatch", "offset length does not match the substitution");
    TruncatedBinAlgebra src(r, trunc), dst(s, trunc);

    /* Source variable i is replaced by the affine form c_i + (row i of m) y. */
    std::vector<std::vector<std::pair<int, Int>>> forms((size_t)r);
    for (const auto& en : m.entries())
        if (en.v != 0) forms[en.r].emplace_back(en.c, en.v);

    ExpandCache cache;
    std::vector<IntMatrix::Entry> trips;
    for (long col = 0; col < src.size(); ++col) {
        SparsePoly acc;
        acc.emplace(MultiIndex{}, 1);
        for (const auto& [var, k] : src.index_at(col).e) {
            SparsePoly factor = expand_affine_binom(c[var], forms[var], k, trunc, cache);
            acc = poly_mul(acc, factor, trunc, cache);
            if (acc.empty()) break;
        }
        for (const auto& [idx, v] : acc)
            trips.push_back({(int32_t)dst.position(idx), (int32_t)col, v});
    }
    return IntMatrix::from_triplets((int)dst.size(), (int)src.size(), trips);
}

IntMatrix monad_compose(int rank, int inner, int outer) {
    TruncatedBinAlgebra inner_alg(rank, inner);
    TruncatedBinAlgebra src((int)inner_alg.size(), outer);
    TruncatedBinAlgebra dst(rank, inner * outer);

    std::vector<IntMatrix::Entry> trips;
    for (long col = 0; col < src.size(); ++col) {
        const MultiIndex& m = src.index_at(col);
        /* Composite basis function x |-> prod_K binom(g_K(x), m_K). */
        auto oracle = [&](const std::vector<Int>& x) {
            Int total = 1;
            for (const auto& [kpos, mult] : m.e) {
                Int g = 1;
                for (const auto& [c, k] : inner_alg.index_at(kpos).e)
                    g *= binom_int(x[c], (unsigned long)k);
                total *= binom_int(g, (unsigned long)mult);
            }
            return total;
        };
        BinElement img = mahler_expand(oracle, rank, inner * outer);
        for (long row = 0; row < dst.size(); ++row)
            if (img.coords[row] != 0) trips.push_back({(int32_t)row, (int32_t)col, img.coords[row]});
    }
    return IntMatrix::from_triplets((int)dst.size(), (int)src.size(), trips);
}

BinElement sym_to_bin(const std::vector<std::pair<MultiIndex, Int>>& poly, int rank, int trunc) {
    auto oracle = [&](const std::vector<Int>& x) {
        Int total = 0;
        for (const auto& [alpha, c] : poly) {
            Int term = c;
            for (const auto& [i, a] : alpha.e) {
                Int p;
                mpz_pow_ui(p.get_mpz_t(), x[i].get_mpz_t(), (unsigned long)a);
                term *= p;
            }
            total += term;
        }
        return total;
    };
    return mahler_expand(oracle, rank, trunc);
}

std::vector<Int> gr_projection(const BinElement& e) {
    check_element(e);
    TruncatedBinAlgebra alg(e.rank, e.trunc);
    std::vector<Int> top;
    for (long i = 0; i < alg.size(); ++i)
        if (alg.index_at(i).total_degree() == e.trunc) top.push_back(e.coords[i]);
    return top;
}

/* ---------------------------------------------------------------- *
 * Periodicity of binomial coefficients modulo prime powers
 * ---------------------------------------------------------------- */

Int mod_pn_period(int k, const Int& p, int n) {
    if (k < 0 || n < 1) fail("rank-mismatch", "need k >= 0 and n >= 1");
    if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 40) == 0) fail("not-prime", p.get_str());

    Int pn;
    mpz_pow_ui(pn.get_mpz_t(), p.get_mpz_t(), (unsigned long)n);

    /* s = min { s : p^s > k }, giving the period bound p^{n-1+s}. */
    int s = 0;
    Int ps = 1;
    while (ps <= k) {
        ps *= p;
        ++s;
    }

    /* A degree-<=k function vanishes mod p^n everywhere iff its Mahler
     * coefficients do, so a candidate shift d is a period iff all forward
     * differences of binom(x+d,k) - binom(x,k) at 0 vanish mod p^n. */
    auto is_period = [&](const Int& d) {
        std::vector<Int> g((size_t)k + 1);
        for (int x = 0; x <= k; ++x)
            g[x] = binom_int(Int(x + d), (unsigned long)k) - binom_int(Int(x), (unsigned long)k);
        for (int j = 1; j <= k; ++j)
            for (int x = k; x >= j; --x) g[x] -= g[x - 1];
        for (int x = 0; x <= k; ++x)
            if (g[x] % pn != 0) return false;
        return true;
    };

    /* Any period divides the guaranteed one, so the minimum is a p-power. */
    Int d = 1;
    for (int e = 0; e <= n - 1 + s; ++e) {
        if (is_period(d)) return d;
        d *= p;
    }
    fail("period-bound-exceeded", "internal: guaranteed period failed verification");
}

}  // namespace binring
