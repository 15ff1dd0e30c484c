#include "binring/cosimplicial.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <tuple>

#include "binring/binomial.hpp"
#include "binring/errors.hpp"

namespace binring {

namespace {

int popcount(uint32_t m) { return __builtin_popcount(m); }

/* Value of the surjection with the given jump set at x. */
int surj_apply(uint32_t jumps, int x) { return popcount(jumps & ((1u << x) - 1u)); }

const DoldKanLevels::Summand* find_summand(const std::vector<DoldKanLevels::Summand>& list,
                                           uint32_t mask) {
    auto it = std::lower_bound(list.begin(), list.end(), mask,
                               [](const DoldKanLevels::Summand& s, uint32_t m) { return s.mask < m; });
    if (it == list.end() || it->mask != mask) return nullptr;
    return &*it;
}

/* delta^j : [m] -> [m+1] skips j; sigma^j : [m] -> [m-1] repeats j. */
std::vector<int> coface_map(int m, int j) {
    std::vector<int> b(m + 1);
    for (int x = 0; x <= m; ++x) b[x] = x < j ? x : x + 1;
    return b;
}

std::vector<int> codegen_map(int m, int j) {
    std::vector<int> b(m + 1);
    for (int x = 0; x <= m; ++x) b[x] = x <= j ? x : x - 1;
    return b;
}

/* The matrix of X(beta) : X^m -> X^{m'} for monotone beta (values beta[x]).
 * Per target summand alpha, the composite g = alpha o beta factors through
 * its image; the block is the identity on the matching source summand when
 * the image is all of [k'], the complex differential when it misses exactly
 * k', and zero otherwise. */
IntMatrix dk_transition(const LatticeCochainComplex& c,
                        const std::vector<DoldKanLevels::Summand>& src,
                        const std::vector<DoldKanLevels::Summand>& tgt, long src_rank,
                        long tgt_rank, const std::vector<int>& beta) {
    int msrc = (int)beta.size() - 1;
    std::vector<IntMatrix::Entry> es;
    for (const auto& a : tgt) {
        int kp = a.degree;
        uint32_t gj = 0;
        uint32_t img = 0;
        int prev = surj_apply(a.mask, beta[0]);
        img |= 1u << prev;
        for (int x = 1; x <= msrc; ++x) {
            int v = surj_apply(a.mask, beta[x]);
            if (v > prev) gj |= 1u << (x - 1);
            img |= 1u << v;
            prev = v;
        }
        uint32_t full = (1u << (kp + 1)) - 1u;
        if (img == full) {
            const auto* s = find_summand(src, gj);
            if (!s) continue;
            long rk = c.rank_at(kp);
            for (long w = 0; w < rk; ++w)
                es.push_back({(int32_t)(a.offset + w), (int32_t)(s->offset + w), Int(1)});
        } else if (kp >= 1 && img == (full >> 1)) {
            const auto* s = find_summand(src, gj);
            if (!s) continue;
            IntMatrix d = c.diff_at(kp - 1);
            for (const auto& en : d.entries())
                es.push_back({(int32_t)(a.offset + en.r), (int32_t)(s->offset + en.c), en.v});
        }
    }
    return IntMatrix::from_triplets((int)tgt_rank, (int)src_rank, std::move(es));
}

std::vector<Int> probe_vector(long n, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> val(-9, 9);
    std::vector<Int> v(n);
    for (auto& x : v) x = val(rng);
    return v;
}

/* a * b == c * d, either as full matrix products or on random probes when
 * the sizes make products unreasonable.  Both modes are exact over Z. */
bool composites_agree(const IntMatrix& a, const IntMatrix& b, const IntMatrix& c,
                      const IntMatrix& d, long exact_rank, uint32_t seed) {
    long biggest = std::max({(long)a.rows(), (long)a.cols(), (long)b.cols(), (long)c.cols()});
    if (biggest <= exact_rank) return a * b == c * d;
    for (uint32_t probe = 0; probe < 3; ++probe) {
        std::vector<Int> v = probe_vector(b.cols(), seed * 7919u + probe);
        if (a.apply(b.apply(v)) != c.apply(d.apply(v))) return false;
    }
    return true;
}

bool composite_is_identity(const IntMatrix& a, const IntMatrix& b, long exact_rank,
                           uint32_t seed) {
    if (std::max(a.rows(), b.cols()) <= exact_rank)
        return a * b == IntMatrix::identity(b.cols());
    for (uint32_t probe = 0; probe < 3; ++probe) {
        std::vector<Int> v = probe_vector(b.cols(), seed * 6271u + probe);
        if (a.apply(b.apply(v)) != v) return false;
    }
    return true;
}

void check_shape(const IntMatrix& m, long rows, long cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols) fail("rank-mismatch", what);
}

/* D^m = sum_j (-1)^j d^j : X^m -> X^{m+1}. */
IntMatrix alternating_coface_sum(const CosimplicialLattice& x, int m) {
    IntMatrix d((int)x.ranks[m + 1], (int)x.ranks[m]);
    for (int j = 0; j <= m + 1; ++j)
        d = (j % 2 == 0) ? d + x.coface[m][j] : d - x.coface[m][j];
    return d;
}

/* Basis of the joint kernel of the codegeneracies out of level m. */
IntMatrix joint_codegen_kernel(const CosimplicialLattice& x, int m) {
    if (m == 0) return IntMatrix::identity((int)x.ranks[0]);
    IntMatrix stack = x.codegen[m][0];
    for (int j = 1; j < m; ++j) stack = stack.vstack(x.codegen[m][j]);
    return hermite_kernel(stack);
}

}  // namespace

void CosimplicialLattice::validate(long exact_rank) const {
    if (levels < 0 || (long)ranks.size() != levels + 1)
        fail("rank-mismatch", "cosimplicial lattice has inconsistent level count");
    if ((long)coface.size() < (long)levels || (long)codegen.size() < (long)levels + 1)
        fail("rank-mismatch", "cosimplicial lattice is missing structure maps");
    for (int m = 0; m < levels; ++m) {
        if ((long)coface[m].size() != m + 2)
            fail("rank-mismatch", "wrong number of cofaces at a level");
        for (int j = 0; j <= m + 1; ++j)
            check_shape(coface[m][j], ranks[m + 1], ranks[m], "coface shape");
    }
    for (int m = 1; m <= levels; ++m) {
        if ((long)codegen[m].size() != m)
            fail("rank-mismatch", "wrong number of codegeneracies at a level");
        for (int j = 0; j < m; ++j)
            check_shape(codegen[m][j], ranks[m - 1], ranks[m], "codegeneracy shape");
    }

    /* d^j d^i = d^i d^{j-1} for i < j. */
    for (int m = 0; m + 1 < levels; ++m)
        for (int i = 0; i <= m + 1; ++i)
            for (int j = i + 1; j <= m + 2; ++j)
                if (!composites_agree(coface[m + 1][j], coface[m][i], coface[m + 1][i],
                                      coface[m][j - 1], exact_rank,
                                      (uint32_t)(m * 961 + i * 31 + j)))
                    fail("cosimplicial-identity-violation", "coface relation at level " +
                                                                std::to_string(m));

    /* s^j s^i = s^i s^{j+1} for i <= j. */
    for (int m = 2; m <= levels; ++m)
        for (int j = 0; j <= m - 2; ++j)
            for (int i = 0; i <= j; ++i)
                if (!composites_agree(codegen[m - 1][j], codegen[m][i], codegen[m - 1][i],
                                      codegen[m][j + 1], exact_rank,
                                      (uint32_t)(m * 1847 + i * 43 + j)))
                    fail("cosimplicial-identity-violation",
                         "codegeneracy relation at level " + std::to_string(m));

    /* s^j d^i: d^i s^{j-1} below, identity on the diagonal pair, d^{i-1} s^j
     * above. */
    for (int m = 1; m < levels; ++m)
        for (int j = 0; j <= m; ++j)
            for (int i = 0; i <= m + 1; ++i) {
                uint32_t seed = (uint32_t)(m * 3557 + i * 59 + j * 7);
                bool ok;
                if (i == j || i == j + 1)
                    ok = composite_is_identity(codegen[m + 1][j], coface[m][i], exact_rank, seed);
                else if (i < j)
                    ok = composites_agree(codegen[m + 1][j], coface[m][i], coface[m - 1][i],
                                          codegen[m][j - 1], exact_rank, seed);
                else
                    ok = composites_agree(codegen[m + 1][j], coface[m][i], coface[m - 1][i - 1],
                                          codegen[m][j], exact_rank, seed);
                if (!ok)
                    fail("cosimplicial-identity-violation",
                         "mixed relation at level " + std::to_string(m));
            }
}

DoldKanLevels dold_kan_cosimplicial(const LatticeCochainComplex& c, int levels) {
    if (levels < 0) fail("degree-out-of-range", "negative cosimplicial level count");
    if (levels > 22) fail("unsupported-size", "cosimplicial level beyond jump-mask width");
    c.validate();
    if (c.lo < 0) fail("degree-out-of-range", "complex must be concentrated in degrees >= 0");

    DoldKanLevels dk;
    dk.c = c;
    dk.summands.resize(levels + 1);
    dk.x.levels = levels;
    dk.x.ranks.assign(levels + 1, 0);
    for (int m = 0; m <= levels; ++m) {
        long off = 0;
        for (uint32_t mask = 0; mask < (1u << m); ++mask) {
            long rk = c.rank_at(popcount(mask));
            if (rk == 0) continue;
            dk.summands[m].push_back({mask, popcount(mask), off});
            off += rk;
        }
        dk.x.ranks[m] = off;
    }
    dk.x.coface.resize(std::max(levels, 0));
    for (int m = 0; m < levels; ++m)
        for (int j = 0; j <= m + 1; ++j)
            dk.x.coface[m].push_back(dk_transition(c, dk.summands[m], dk.summands[m + 1],
                                                   dk.x.ranks[m], dk.x.ranks[m + 1],
                                                   coface_map(m, j)));
    dk.x.codegen.resize(levels + 1);
    for (int m = 1; m <= levels; ++m)
        for (int j = 0; j < m; ++j)
            dk.x.codegen[m].push_back(dk_transition(c, dk.summands[m], dk.summands[m - 1],
                                                    dk.x.ranks[m], dk.x.ranks[m - 1],
                                                    codegen_map(m, j)));
    dk.x.validate();
    return dk;
}

CosimplicialLattice apply_bin_levelwise(const CosimplicialLattice& x, int trunc) {
    if (trunc < 0) fail("degree-out-of-range", "negative truncation");
    x.validate();
    CosimplicialLattice b;
    b.levels = x.levels;
    b.ranks.assign(x.levels + 1, 0);
    for (int m = 0; m <= x.levels; ++m)
        b.ranks[m] = TruncatedBinAlgebra((int)x.ranks[m], trunc).size();
    b.coface.resize(x.coface.size());
    for (size_t m = 0; m < x.coface.size(); ++m)
        for (const auto& f : x.coface[m]) b.coface[m].push_back(induced_map(f, trunc));
    b.codegen.resize(x.codegen.size());
    for (size_t m = 0; m < x.codegen.size(); ++m)
        for (const auto& f : x.codegen[m]) b.codegen[m].push_back(induced_map(f, trunc));
    /* Functors preserve the identities, but re-check: full products on small
     * levels, exact random probes past that. */
    b.validate(400);
    return b;
}

FgAbGroup total_cohomology(const CosimplicialLattice& x, int degree, bool normalized) {
    if (degree < 0) fail("degree-out-of-range", "negative cohomological degree");
    if (x.levels < degree + 1)
        fail("need-more-levels", "degree " + std::to_string(degree) + " needs levels up to " +
                                     std::to_string(degree + 1) + ", have " +
                                     std::to_string(x.levels));
    IntMatrix d_in = degree == 0 ? IntMatrix((int)x.ranks[0], 0)
                                 : alternating_coface_sum(x, degree - 1);
    IntMatrix d_out = alternating_coface_sum(x, degree);
    if (!normalized) return cohomology_of_pair(d_in, d_out);

    IntMatrix k_mid = joint_codegen_kernel(x, degree);
    IntMatrix k_next = joint_codegen_kernel(x, degree + 1);
    IntMatrix nd_in;
    if (degree == 0) {
        nd_in = IntMatrix(k_mid.cols(), 0);
    } else {
        IntMatrix k_prev = joint_codegen_kernel(x, degree - 1);
        nd_in = solve_columns(k_mid, d_in * k_prev);
    }
    IntMatrix nd_out = solve_columns(k_next, d_out * k_mid);
    return cohomology_of_pair(nd_in, nd_out);
}

FgAbGroup direct_sum_groups(const std::vector<FgAbGroup>& parts) {
    long free_sum = 0;
    std::vector<Int> fs;
    for (const auto& p : parts) {
        free_sum += p.free_rank;
        fs.insert(fs.end(), p.factors.begin(), p.factors.end());
    }
    if (fs.empty()) return {free_sum, {}};
    FgAbGroup tor = cokernel_structure(IntMatrix::diagonal((int)fs.size(), (int)fs.size(), fs));
    return {free_sum + tor.free_rank, tor.factors};
}

/* ------------------------------------------------------------------ *
 * Fused pipeline.
 * ------------------------------------------------------------------ */

bool fused_path_supported(const LatticeCochainComplex& c, int trunc) {
    if (trunc < 0) return false;
    for (const auto& d : c.diffs) {
        std::vector<int> cnt(d.rows(), 0);
        for (const auto& e : d.entries())
            if (++cnt[e.r] > 1) return false;
    }
    return true;
}

namespace {

/* Normalized basis of Bin^{<=t}(X^m): product indices whose support's jump
 * sets cover every position 0..m-1.  Sorted graded-lex, so total-degree
 * slices are contiguous. */
struct NLevel {
    std::vector<MultiIndex> basis;
    std::vector<long> slice_begin;  // size trunc + 2
};

std::vector<uint32_t> jump_per_coord(const DoldKanLevels& dk, int m) {
    std::vector<uint32_t> jump(dk.x.ranks[m], 0);
    for (const auto& s : dk.summands[m]) {
        long rk = dk.c.rank_at(s.degree);
        for (long w = 0; w < rk; ++w) jump[s.offset + w] = s.mask;
    }
    return jump;
}

NLevel build_nlevel(const DoldKanLevels& dk, int m, int trunc, long cap) {
    NLevel out;
    long nvars = dk.x.ranks[m];
    uint32_t full = m >= 1 ? (1u << m) - 1u : 0u;
    std::vector<uint32_t> jump = jump_per_coord(dk, m);
    std::vector<uint32_t> suffix(nvars + 1, 0);
    for (long v = nvars - 1; v >= 0; --v) suffix[v] = suffix[v + 1] | jump[v];

    std::vector<std::pair<int, int>> cur;
    std::function<void(long, int, uint32_t)> rec = [&](long v0, int rem, uint32_t cov) {
        if (cov == full) {
            out.basis.push_back(MultiIndex{cur});
            if ((long)out.basis.size() > cap)
                fail("unsupported-size", "normalized basis exceeds the fused-path budget");
        }
        if (rem == 0) return;
        for (long v = v0; v < nvars; ++v) {
            if ((cov | suffix[v]) != full) break;
            cur.emplace_back((int)v, 0);
            uint32_t nc = cov | jump[v];
            for (int e = 1; e <= rem; ++e) {
                cur.back().second = e;
                rec(v + 1, rem - e, nc);
            }
            cur.pop_back();
        }
    };
    rec(0, trunc, 0);
    std::sort(out.basis.begin(), out.basis.end(), graded_lex_less);

    out.slice_begin.assign(trunc + 2, 0);
    for (int g = 0; g <= trunc + 1; ++g) {
        auto it = std::lower_bound(out.basis.begin(), out.basis.end(), g,
                                   [](const MultiIndex& k, int deg) { return k.total_degree() < deg; });
        out.slice_begin[g] = it - out.basis.begin();
    }
    return out;
}

/* Memoized expansions of the coface pullbacks of single variables, under a
 * deterministic budget on polynomial terms retained (memo plus emitted
 * entries).  Oversized inputs then abort identically on every machine
 * instead of exhausting memory on some of them. */
struct SlotExpander {
    int trunc;
    ExpandCache& cache;
    long cap;
    long terms = 0;
    std::vector<std::vector<std::vector<std::pair<int, Int>>>> lin;
    std::map<std::tuple<int, int, int>, SparsePoly> memo;

    SlotExpander(const DoldKanLevels& dk, int m, int trunc_, ExpandCache& cache_, long cap_)
        : trunc(trunc_), cache(cache_), cap(cap_) {
        lin.resize(m + 2);
        for (int j = 0; j <= m + 1; ++j) {
            lin[j].assign(dk.x.ranks[m], {});
            for (const auto& e : dk.x.coface[m][j].entries()) lin[j][e.c].emplace_back(e.r, e.v);
        }
    }

    void charge(long n) {
        terms += n;
        if (terms > cap)
            fail("unsupported-size",
                 "fused expansion exceeds the memory budget; use a smaller truncation");
    }

    /* Scratch polynomials count against the budget while they are alive. */
    void check_transient(long n) {
        if (terms + n > cap)
            fail("unsupported-size",
                 "fused expansion exceeds the memory budget; use a smaller truncation");
    }

    const SparsePoly& slot(int j, int var, int exp) {
        auto key = std::make_tuple(j, var, exp);
        auto it = memo.find(key);
        if (it == memo.end()) {
            it = memo.emplace(key, expand_affine_binom(0, lin[j][var], exp, trunc, cache)).first;
            charge((long)it->second.size());
        }
        return it->second;
    }
};

/* One column of the alternating coface sum, expanded in closed form.  Sound
 * because the row-disjointness precondition makes the pullbacks of distinct
 * source variables live on disjoint target variables. */
SparsePoly expand_column(SlotExpander& ex, const MultiIndex& k, int nj) {
    SparsePoly acc_col;
    for (int j = 0; j < nj; ++j) {
        SparsePoly acc;
        acc[MultiIndex{}] = 1;
        for (const auto& [var, exp] : k.e) {
            const SparsePoly& sp = ex.slot(j, var, exp);
            if (sp.empty()) {
                acc.clear();
                break;
            }
            acc = poly_mul(acc, sp, ex.trunc, ex.cache);
            if (acc.empty()) break;
            ex.check_transient((long)acc.size() + (long)acc_col.size());
        }
        for (const auto& [idx, v] : acc) {
            if (j % 2 == 0)
                acc_col[idx] += v;
            else
                acc_col[idx] -= v;
        }
        ex.check_transient((long)acc_col.size());
    }
    return acc_col;
}

/* Matrix of the alternating coface sum between enumerated normalized bases. */
IntMatrix fused_diff(const DoldKanLevels& dk, const NLevel& src, const NLevel& tgt, int m,
                     int trunc, ExpandCache& cache, long entry_cap) {
    SlotExpander ex(dk, m, trunc, cache, entry_cap);
    std::vector<uint32_t> jump_tgt = jump_per_coord(dk, m + 1);
    uint32_t full_tgt = (1u << (m + 1)) - 1u;
    std::vector<IntMatrix::Entry> es;
    for (long col = 0; col < (long)src.basis.size(); ++col) {
        SparsePoly acc_col = expand_column(ex, src.basis[col], m + 2);
        for (const auto& [idx, v] : acc_col) {
            if (v == 0) continue;
            uint32_t cov = 0;
            for (const auto& [c2, e2] : idx.e) cov |= jump_tgt[c2];
            if (cov != full_tgt)
                fail("cosimplicial-identity-violation",
                     "non-normalized residue survived the alternating sum");
            auto it = std::lower_bound(tgt.basis.begin(), tgt.basis.end(), idx, graded_lex_less);
            if (it == tgt.basis.end() || !(*it == idx))
                fail("cosimplicial-identity-violation", "fused image misses the normalized basis");
            es.push_back({(int32_t)(it - tgt.basis.begin()), (int32_t)col, v});
            ex.charge(1);
        }
    }
    return IntMatrix::from_triplets((int)tgt.basis.size(), (int)src.basis.size(), std::move(es));
}

std::vector<int> slice_range(const NLevel& lv, int g) {
    std::vector<int> idx;
    for (long p = lv.slice_begin[g]; p < lv.slice_begin[g + 1]; ++p) idx.push_back((int)p);
    return idx;
}

/* ------------------------------------------------------------------ *
 * Top-level differential with anonymous rows.  The cohomology pair only
 * uses the outgoing differential through its rank and the saturation of
 * its kernel, so the target basis never has to be enumerated: rows are
 * keyed by the target index itself and zero rows are simply absent.
 * ------------------------------------------------------------------ */

/* 16-byte packed key: (coord << 4 | exp) per support slot, 0xFFFF padding.
 * Usable when coords fit 12 bits and the truncation keeps the support and
 * exponents within 8 slots of 4 bits each. */
struct Packed16 {
    std::array<uint16_t, 8> w;

    bool operator<(const Packed16& o) const { return w < o.w; }
    bool operator==(const Packed16& o) const { return w == o.w; }
};

bool pack16(const MultiIndex& k, Packed16& out) {
    if (k.e.size() > 8) return false;
    out.w.fill(0xFFFF);
    for (size_t i = 0; i < k.e.size(); ++i) {
        if (k.e[i].first >= 4096 || k.e[i].second >= 16) return false;
        out.w[i] = (uint16_t)((k.e[i].first << 4) | k.e[i].second);
    }
    return true;
}

/* Outgoing differential on a column range of src (one total-degree slice,
 * or everything) with hashed rows.  Entry counts beyond the budget abort
 * cleanly instead of exhausting memory. */
IntMatrix fused_top_slice(const DoldKanLevels& dk, const NLevel& src, long col0, long col1,
                          int m, int trunc, ExpandCache& cache, long entry_cap) {
    SlotExpander ex(dk, m, trunc, cache, entry_cap);
    std::vector<uint32_t> jump_tgt = jump_per_coord(dk, m + 1);
    uint32_t full_tgt = (1u << (m + 1)) - 1u;
    bool packable = dk.x.ranks[m + 1] < 4096 && trunc <= 8;

    struct PackedEntry {
        Packed16 key;
        int32_t col;
        Int v;
    };
    std::vector<PackedEntry> packed;
    std::map<MultiIndex, int32_t> rowid;
    std::vector<IntMatrix::Entry> loose;

    for (long col = col0; col < col1; ++col) {
        SparsePoly acc_col = expand_column(ex, src.basis[col], m + 2);
        for (const auto& [idx, v] : acc_col) {
            if (v == 0) continue;
            uint32_t cov = 0;
            for (const auto& [c2, e2] : idx.e) cov |= jump_tgt[c2];
            if (cov != full_tgt)
                fail("cosimplicial-identity-violation",
                     "non-normalized residue survived the alternating sum");
            if (packable) {
                Packed16 key;
                if (!pack16(idx, key)) fail("rank-mismatch", "packing invariant broken");
                packed.push_back({key, (int32_t)(col - col0), v});
            } else {
                auto [it, fresh] = rowid.emplace(idx, (int32_t)rowid.size());
                loose.push_back({it->second, (int32_t)(col - col0), v});
            }
            ex.charge(1);
        }
    }

    const int ncols = (int)(col1 - col0);
    if (packable) {
        std::sort(packed.begin(), packed.end(), [](const PackedEntry& a, const PackedEntry& b) {
            return a.key < b.key ? true : (b.key < a.key ? false : a.col < b.col);
        });
        std::vector<IntMatrix::Entry> tr;
        tr.reserve(packed.size());
        int32_t rid = -1;
        for (size_t i = 0; i < packed.size(); ++i) {
            if (i == 0 || !(packed[i].key == packed[i - 1].key)) ++rid;
            tr.push_back({rid, packed[i].col, std::move(packed[i].v)});
        }
        return IntMatrix::from_triplets(rid + 1, ncols, std::move(tr));
    }
    return IntMatrix::from_triplets((int)rowid.size(), ncols, std::move(loose));
}

}  // namespace

long fused_normalized_rank(const LatticeCochainComplex& c, int trunc, int level) {
    if (trunc < 0 || level < 0) fail("degree-out-of-range", "negative truncation or level");
    if (!fused_path_supported(c, trunc))
        fail("unsupported-size", "fused path needs row-disjoint differentials");
    DoldKanLevels dk = dold_kan_cosimplicial(c, level);
    return (long)build_nlevel(dk, level, trunc, 20000000L).basis.size();
}

FgAbGroup fused_bin_cohomology(const LatticeCochainComplex& c, int trunc, int degree) {
    if (trunc < 0 || degree < 0) fail("degree-out-of-range", "negative truncation or degree");
    if (!fused_path_supported(c, trunc))
        fail("unsupported-size", "fused path needs row-disjoint differentials");
    const long cap = 20000000L;
    const long entry_cap = 12000000L;
    DoldKanLevels dk = dold_kan_cosimplicial(c, degree + 1);
    ExpandCache cache;
    NLevel mid = build_nlevel(dk, degree, trunc, cap);
    NLevel low;
    IntMatrix d_in;
    if (degree >= 1) {
        low = build_nlevel(dk, degree - 1, trunc, cap);
        d_in = fused_diff(dk, low, mid, degree - 1, trunc, cache, entry_cap);
    } else {
        d_in = IntMatrix((int)mid.basis.size(), 0);
    }

    bool free_complex = true;
    for (const auto& d : c.diffs) free_complex = free_complex && d.is_zero();
    if (!free_complex) {
        IntMatrix d_out =
            fused_top_slice(dk, mid, 0, (long)mid.basis.size(), degree, trunc, cache, entry_cap);
        return cohomology_of_pair(d_in, d_out);
    }

    /* Free input: everything in sight is homogeneous, so the pair splits
     * into total-degree slices that are assembled and resolved one at a
     * time, keeping only one slice of the big differential in memory. */
    std::vector<FgAbGroup> parts;
    for (int g = 0; g <= trunc; ++g) {
        std::vector<int> rm = slice_range(mid, g);
        IntMatrix d0 = degree >= 1 ? d_in.submatrix(rm, slice_range(low, g))
                                   : IntMatrix((int)rm.size(), 0);
        IntMatrix d1 = fused_top_slice(dk, mid, mid.slice_begin[g], mid.slice_begin[g + 1],
                                       degree, trunc, cache, entry_cap);
        parts.push_back(cohomology_of_pair(d0, d1));
    }
    return direct_sum_groups(parts);
}

}  // namespace binring
