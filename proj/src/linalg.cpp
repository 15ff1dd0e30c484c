#include "binring/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>
#include <sstream>

namespace binring {

namespace {

/* Quotient rounded to nearest, so remainders stay in (-|b|/2, |b|/2]. */
Int quot_near(const Int& a, const Int& b) {
    Int q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    Int r2 = r * 2;
    if (mpz_cmpabs(r2.get_mpz_t(), b.get_mpz_t()) > 0)
        q += (sgn(a) == sgn(b)) ? 1 : -1;
    return q;
}

using SpVec = std::vector<std::pair<int32_t, Int>>;  // (index, value), sorted, no zeros

const Int* sp_find(const SpVec& v, int32_t idx) {
    auto it = std::lower_bound(v.begin(), v.end(), idx,
                               [](const auto& e, int32_t k) { return e.first < k; });
    if (it != v.end() && it->first == idx) return &it->second;
    return nullptr;
}

/* dst -= q * src.  Calls touched(idx, now_present) for structural changes. */
template <class F>
void sp_axpy(SpVec& dst, const SpVec& src, const Int& q, F&& touched) {
    SpVec out;
    out.reserve(dst.size() + src.size());
    size_t a = 0, b = 0;
    while (a < dst.size() || b < src.size()) {
        if (b == src.size() || (a < dst.size() && dst[a].first < src[b].first)) {
            out.push_back(std::move(dst[a++]));
        } else if (a == dst.size() || src[b].first < dst[a].first) {
            Int v = -q * src[b].second;
            if (v != 0) {
                touched(src[b].first, true);
                out.emplace_back(src[b].first, std::move(v));
            }
            ++b;
        } else {
            Int v = dst[a].second - q * src[b].second;
            if (v != 0)
                out.emplace_back(dst[a].first, std::move(v));
            else
                touched(dst[a].first, false);
            ++a, ++b;
        }
    }
    dst = std::move(out);
}

void sp_scale_neg(SpVec& v) {
    for (auto& e : v) e.second = -e.second;
}

/* Row-echelon style workspace for Smith form, rank and cokernels.
 * Row-major storage plus a lazily maintained column membership index. */
struct RowWork {
    int nr = 0, nc = 0;
    std::vector<SpVec> rows;
    std::vector<int> col_len;
    std::vector<std::vector<int32_t>> col_rows;
    std::vector<char> row_act, col_act;
    bool track_u = false, track_v = false;
    std::vector<SpVec> urows;  // rows of U
    std::vector<SpVec> vcols;  // columns of V
    std::priority_queue<std::pair<int, int>, std::vector<std::pair<int, int>>,
                        std::greater<>>
        colq;  // (col_len, col), lazy

    void init(const IntMatrix& m, bool tu, bool tv) {
        nr = m.rows();
        nc = m.cols();
        rows.assign(nr, {});
        col_len.assign(nc, 0);
        col_rows.assign(nc, {});
        row_act.assign(nr, 1);
        col_act.assign(nc, 1);
        for (const auto& e : m.entries()) {
            rows[e.r].emplace_back(e.c, e.v);
            col_len[e.c]++;
            col_rows[e.c].push_back(e.r);
        }
        track_u = tu;
        track_v = tv;
        if (tu) {
            urows.assign(nr, {});
            for (int i = 0; i < nr; ++i) urows[i].emplace_back(i, Int(1));
        }
        if (tv) {
            vcols.assign(nc, {});
            for (int j = 0; j < nc; ++j) vcols[j].emplace_back(j, Int(1));
        }
        for (int j = 0; j < nc; ++j)
            if (col_len[j]) colq.emplace(col_len[j], j);
    }

    void row_axpy(int dst, int src, const Int& q) {
        sp_axpy(rows[dst], rows[src], q, [&](int32_t c, bool added) {
            if (added) {
                col_len[c]++;
                col_rows[c].push_back(dst);
            } else {
                col_len[c]--;
            }
            colq.emplace(col_len[c], c);
        });
        if (track_u) {
            sp_axpy(urows[dst], urows[src], q, [](int32_t, bool) {});
        }
    }

    /* Valid row ids currently holding a nonzero in column c (also compacts
     * the lazy index). */
    std::vector<int32_t> live_rows(int c) {
        auto& lst = col_rows[c];
        std::sort(lst.begin(), lst.end());
        lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
        std::vector<int32_t> out;
        out.reserve(lst.size());
        for (int32_t r : lst)
            if (row_act[r] && sp_find(rows[r], c)) out.push_back(r);
        lst.assign(out.begin(), out.end());
        return out;
    }

    void drop_entry(int r, int c) {
        auto& row = rows[r];
        auto it = std::lower_bound(row.begin(), row.end(), c,
                                   [](const auto& e, int k) { return e.first < k; });
        row.erase(it);
        col_len[c]--;
        colq.emplace(col_len[c], c);
    }

    void add_to_entry(int r, int c, const Int& delta) {
        auto& row = rows[r];
        auto it = std::lower_bound(row.begin(), row.end(), c,
                                   [](const auto& e, int k) { return e.first < k; });
        it->second += delta;
        if (it->second == 0) {
            row.erase(it);
            col_len[c]--;
            colq.emplace(col_len[c], c);
        }
    }
};

struct PivotRec {
    int r, c;
    Int d;
};

/* Diagonalization loop shared by rank / SNF / cokernel.  rank_only skips the
 * pivot-row cleanup entirely: once the pivot column is cleared, expanding
 * along it shows the dropped row cannot change the rank. */
std::vector<PivotRec> diagonalize(RowWork& w, bool rank_only) {
    std::vector<PivotRec> pivots;
    while (!w.colq.empty()) {
        auto [len, c0] = w.colq.top();
        w.colq.pop();
        if (!w.col_act[c0] || w.col_len[c0] != len || len == 0) continue;

        int c = c0;
        int pr = -1;
        Int pv;
        for (;;) {
            /* Clear column c down to one entry via gcd row operations. */
            for (;;) {
                auto live = w.live_rows(c);
                if (live.empty()) {
                    pr = -1;
                    break;
                }
                /* Smallest |value| first (the gcd descent needs it), then the
                 * shortest row to limit fill-in. */
                pr = -1;
                long best_len = 0;
                for (int32_t r : live) {
                    const Int* v = sp_find(w.rows[r], c);
                    long rl = (long)w.rows[r].size();
                    int cmp = pr < 0 ? -1 : mpz_cmpabs(v->get_mpz_t(), pv.get_mpz_t());
                    if (cmp < 0 || (cmp == 0 && rl < best_len)) {
                        pr = r;
                        pv = *v;
                        best_len = rl;
                    }
                }
                bool changed = false;
                for (int32_t r : live) {
                    if (r == pr) continue;
                    const Int* v = sp_find(w.rows[r], c);
                    if (!v) continue;
                    Int q = quot_near(*v, pv);
                    if (q != 0) w.row_axpy(r, pr, q);
                    if (sp_find(w.rows[r], c)) changed = true;  // remainder left
                }
                if (!changed) break;
            }
            if (pr < 0) break;  // column went empty; nothing to pivot here

            if (rank_only) break;

            /* Pivot row cleanup.  The pivot column is now a single entry, so
             * column operations against it only touch the pivot row. */
            std::vector<std::pair<int32_t, Int>> rest;
            for (const auto& e : w.rows[pr])
                if (e.first != c) rest.emplace_back(e.first, e.second);
            if (rest.empty()) break;

            bool all_div = true;
            for (const auto& e : rest)
                if (e.second % pv != 0) all_div = false;

            if (all_div) {
                for (const auto& e : rest) {
                    Int q = e.second / pv;
                    if (w.track_v)
                        sp_axpy(w.vcols[e.first], w.vcols[c], q, [](int32_t, bool) {});
                    w.drop_entry(pr, e.first);
                }
                break;
            }
            /* Reduce the pivot row modulo pv, then restart with the smallest
             * remainder as the new pivot; its column may need re-clearing. */
            int next_c = -1;
            Int next_v;
            for (const auto& e : rest) {
                Int q = quot_near(e.second, pv);
                if (q != 0) {
                    if (w.track_v)
                        sp_axpy(w.vcols[e.first], w.vcols[c], q, [](int32_t, bool) {});
                    w.add_to_entry(pr, e.first, -q * pv);
                }
                if (const Int* nv = sp_find(w.rows[pr], e.first)) {
                    if (next_c < 0 || mpz_cmpabs(nv->get_mpz_t(), next_v.get_mpz_t()) < 0) {
                        next_c = e.first;
                        next_v = *nv;
                    }
                }
            }
            if (next_c < 0) break;  // everything divided after all
            c = next_c;
        }
        if (pr < 0) continue;

        Int d = w.rows[pr].empty() ? Int(0) : pv;
        if (d == 0) continue;
        if (d < 0) {
            d = -d;
            if (!rank_only) {
                sp_scale_neg(w.rows[pr]);
                if (w.track_u) sp_scale_neg(w.urows[pr]);
            }
        }
        pivots.push_back({pr, c, d});
        w.row_act[pr] = 0;
        w.col_act[c] = 0;
        if (rank_only) {
            /* Forget the pivot row so later columns skip its entries. */
            for (const auto& e : w.rows[pr]) {
                if (e.first == c) continue;
                w.col_len[e.first]--;
                w.colq.emplace(w.col_len[e.first], e.first);
            }
            w.rows[pr].clear();
        }
        /* The pivot may have wandered away from the popped column; give that
         * column its queue slot back or it starves. */
        if (w.col_act[c0] && w.col_len[c0] > 0) w.colq.emplace(w.col_len[c0], c0);
    }
    return pivots;
}

/* Fold (a, b) into (gcd, lcm) with the matching unimodular updates on rows
 * i, j of U and columns i, j of V. */
void fold_pair(Int& a, Int& b, std::vector<SpVec>* urows, std::vector<SpVec>* vcols,
               int i, int j) {
    Int g, x, y;
    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    Int l = a / g * b;
    if (urows) {
        SpVec ui = (*urows)[i], uj = (*urows)[j];
        SpVec nui = ui, nuj = uj;
        /* nui = x*ui + y*uj ; nuj = (-b/g)*ui + (a/g)*uj */
        for (auto& e : nui) e.second *= x;
        sp_axpy(nui, uj, -y, [](int32_t, bool) {});
        for (auto& e : nuj) e.second *= (a / g);
        sp_axpy(nuj, ui, b / g, [](int32_t, bool) {});
        (*urows)[i] = std::move(nui);
        (*urows)[j] = std::move(nuj);
    }
    if (vcols) {
        SpVec vi = (*vcols)[i], vj = (*vcols)[j];
        SpVec nvi = vi;
        sp_axpy(nvi, vj, Int(-1), [](int32_t, bool) {});  // vi + vj
        SpVec nvj = vj;
        for (auto& e : nvj) e.second *= (x * a / g);
        sp_axpy(nvj, vi, y * b / g, [](int32_t, bool) {});
        (*vcols)[i] = std::move(nvi);
        (*vcols)[j] = std::move(nvj);
    }
    a = g;
    b = l;
}

IntMatrix rows_to_matrix(const std::vector<SpVec>& rws, int nc, const std::vector<int>& order) {
    std::vector<IntMatrix::Entry> ents;
    for (size_t i = 0; i < order.size(); ++i)
        for (const auto& e : rws[order[i]]) ents.push_back({(int32_t)i, e.first, e.second});
    return IntMatrix::from_triplets((int)order.size(), nc, std::move(ents));
}

}  // namespace

SmithResult smith_normal_form(const IntMatrix& m, bool want_transforms) {
    RowWork w;
    w.init(m, want_transforms, want_transforms);
    auto pivots = diagonalize(w, false);

    SmithResult res;
    res.diag.reserve(pivots.size());
    for (auto& p : pivots) res.diag.push_back(p.d);

    if (!want_transforms) {
        /* Divisibility fixing on values alone; almost all entries are 1. */
        std::vector<Int> big;
        for (auto& d : res.diag)
            if (d != 1) big.push_back(d);
        size_t ones = res.diag.size() - big.size();
        for (size_t i = 0; i + 1 < big.size(); ++i)
            for (size_t j = i + 1; j < big.size(); ++j)
                if (big[j] % big[i] != 0) fold_pair(big[i], big[j], nullptr, nullptr, 0, 0);
        /* A fold can create fresh 1s. */
        std::vector<Int> out(ones, Int(1));
        for (auto& d : big)
            if (d == 1)
                out.insert(out.begin(), Int(1));
            else
                out.push_back(d);
        res.diag = std::move(out);
        return res;
    }

    /* Assemble U and V with pivot rows/columns moved up front. */
    std::vector<int> urow_order, vcol_order;
    for (auto& p : pivots) urow_order.push_back(p.r);
    for (auto& p : pivots) vcol_order.push_back(p.c);
    std::vector<char> used_r(w.nr, 0), used_c(w.nc, 0);
    for (auto& p : pivots) used_r[p.r] = 1, used_c[p.c] = 1;
    for (int r = 0; r < w.nr; ++r)
        if (!used_r[r]) urow_order.push_back(r);
    for (int c = 0; c < w.nc; ++c)
        if (!used_c[c]) vcol_order.push_back(c);

    /* Reindex U rows / V columns into final positions before chain fixing. */
    std::vector<SpVec> urows(w.nr), vcols(w.nc);
    for (int i = 0; i < w.nr; ++i) urows[i] = std::move(w.urows[urow_order[i]]);
    for (int j = 0; j < w.nc; ++j) vcols[j] = std::move(w.vcols[vcol_order[j]]);

    for (size_t i = 0; i + 1 < res.diag.size(); ++i)
        for (size_t j = i + 1; j < res.diag.size(); ++j)
            if (res.diag[j] % res.diag[i] != 0)
                fold_pair(res.diag[i], res.diag[j], &urows, &vcols, (int)i, (int)j);

    std::vector<int> ident(w.nr);
    for (int i = 0; i < w.nr; ++i) ident[i] = i;
    res.u = rows_to_matrix(urows, w.nr, ident);
    std::vector<IntMatrix::Entry> vents;
    for (int j = 0; j < w.nc; ++j)
        for (const auto& e : vcols[j]) vents.push_back({e.first, (int32_t)j, e.second});
    res.v = IntMatrix::from_triplets(w.nc, w.nc, std::move(vents));
    return res;
}

long rank(const IntMatrix& m) {
    RowWork w;
    w.init(m, false, false);
    return (long)diagonalize(w, true).size();
}

FgAbGroup cokernel_structure(const IntMatrix& m) {
    auto snf = smith_normal_form(m, false);
    FgAbGroup g;
    g.free_rank = m.rows() - (long)snf.diag.size();
    for (auto& d : snf.diag)
        if (d > 1) g.factors.push_back(d);
    return g;
}

namespace {

/* Column-echelon workspace (used for kernels and for solving). */
struct ColWork {
    int nr = 0, nc = 0;
    std::vector<SpVec> cols;   // (row, val)
    std::vector<SpVec> vcols;  // combination bookkeeping over original columns
    std::vector<char> finished;
    struct Pivot {
        int row, col;
    };
    std::vector<Pivot> pivots;  // ascending leading row

    void init(const IntMatrix& m) {
        nr = m.rows();
        nc = m.cols();
        cols.assign(nc, {});
        vcols.assign(nc, {});
        finished.assign(nc, 0);
        std::vector<IntMatrix::Entry> byc(m.entries());
        std::sort(byc.begin(), byc.end(), [](const auto& a, const auto& b) {
            return a.c != b.c ? a.c < b.c : a.r < b.r;
        });
        for (auto& e : byc) cols[e.c].emplace_back(e.r, e.v);
        for (int j = 0; j < nc; ++j) vcols[j].emplace_back(j, Int(1));
    }

    void col_axpy(int dst, int src, const Int& q) {
        sp_axpy(cols[dst], cols[src], q, [](int32_t, bool) {});
        sp_axpy(vcols[dst], vcols[src], q, [](int32_t, bool) {});
    }

    void echelonize() {
        /* Leading rows only move down, so one ascending sweep suffices. */
        std::vector<std::vector<int>> bucket(nr + 1);
        for (int j = 0; j < nc; ++j)
            if (!cols[j].empty()) bucket[cols[j][0].first].push_back(j);
        for (int row = 0; row < nr; ++row) {
            for (;;) {
                std::sort(bucket[row].begin(), bucket[row].end());
                bucket[row].erase(std::unique(bucket[row].begin(), bucket[row].end()),
                                  bucket[row].end());
                std::vector<int> live;
                for (int j : bucket[row])
                    if (!finished[j] && !cols[j].empty() && cols[j][0].first == row)
                        live.push_back(j);
                bucket[row] = live;
                if (live.empty()) break;
                int jp = live[0];
                for (int j : live) {
                    const Int& a = cols[j][0].second;
                    const Int& b = cols[jp][0].second;
                    if (mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()) < 0 ||
                        (mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()) == 0 &&
                         cols[j].size() < cols[jp].size()))
                        jp = j;
                }
                bool rem = false;
                for (int j : live) {
                    if (j == jp) continue;
                    Int q = quot_near(cols[j][0].second, cols[jp][0].second);
                    if (q != 0) col_axpy(j, jp, q);
                    if (!cols[j].empty()) {
                        bucket[cols[j][0].first].push_back(j);
                        if (cols[j][0].first == row) rem = true;
                    }
                }
                if (!rem) {
                    finished[jp] = 1;
                    if (cols[jp][0].second < 0) {
                        sp_scale_neg(cols[jp]);
                        sp_scale_neg(vcols[jp]);
                    }
                    pivots.push_back({row, jp});
                    break;
                }
                bucket[row].push_back(jp);
            }
        }
    }
};

}  // namespace

IntMatrix hermite_kernel(const IntMatrix& m) {
    ColWork w;
    w.init(m);
    w.echelonize();
    std::vector<IntMatrix::Entry> ents;
    int k = 0;
    for (int j = 0; j < w.nc; ++j) {
        if (!w.cols[j].empty()) continue;
        for (const auto& e : w.vcols[j]) ents.push_back({e.first, k, e.second});
        ++k;
    }
    return IntMatrix::from_triplets(m.cols(), k, std::move(ents));
}

IntMatrix solve_columns(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows()) fail("rank-mismatch", "solve shapes");
    ColWork w;
    w.init(a);
    w.echelonize();

    std::vector<std::vector<std::pair<int, Int>>> bcols(b.cols());
    for (const auto& e : b.entries()) bcols[e.c].emplace_back(e.r, e.v);

    std::vector<IntMatrix::Entry> xents;
    for (int bc = 0; bc < b.cols(); ++bc) {
        std::vector<Int> resid(a.rows(), Int(0));
        for (auto& [r, v] : bcols[bc]) resid[r] = v;
        SpVec x;  // combination over original columns
        for (const auto& p : w.pivots) {
            const Int& pv = w.cols[p.col][0].second;
            if (resid[p.row] == 0) continue;
            if (resid[p.row] % pv != 0) fail("unsolvable", "no integral solution");
            Int q = resid[p.row] / pv;
            for (const auto& e : w.cols[p.col]) resid[e.first] -= q * e.second;
            sp_axpy(x, w.vcols[p.col], -q, [](int32_t, bool) {});
        }
        for (const auto& r : resid)
            if (r != 0) fail("unsolvable", "no integral solution");
        for (const auto& e : x) xents.push_back({e.first, bc, e.second});
    }
    return IntMatrix::from_triplets(a.cols(), b.cols(), std::move(xents));
}

FgAbGroup dual_finite_group(const FgAbGroup& g) {
    if (!g.is_finite()) fail("not-finite", "dual of a group with free rank");
    return g;
}

namespace {

Int det_bareiss(std::vector<std::vector<Int>> d) {
    int n = (int)d.size();
    if (n == 0) return Int(1);
    Int prev(1);
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        int piv = -1;
        for (int r = k; r < n; ++r)
            if (d[r][k] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return Int(0);
        if (piv != k) {
            std::swap(d[piv], d[k]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                d[i][j] = (d[i][j] * d[k][k] - d[i][k] * d[k][j]) / prev;
        prev = d[k][k];
    }
    return sign > 0 ? d[n - 1][n - 1] : -d[n - 1][n - 1];
}

void subsets_lex(int n, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(k);
    if (k == 0) {
        out.push_back({});
        return;
    }
    if (k > n) return;
    for (int i = 0; i < k; ++i) cur[i] = i;
    for (;;) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
}

}  // namespace

IntMatrix exterior_power(const IntMatrix& f, int k) {
    if (k < 0) fail("degree-out-of-range", "negative exterior power");
    std::vector<std::vector<int>> rsub, csub;
    subsets_lex(f.rows(), k, rsub);
    subsets_lex(f.cols(), k, csub);
    auto dense = f.to_dense();
    std::vector<IntMatrix::Entry> ents;
    for (size_t i = 0; i < rsub.size(); ++i)
        for (size_t j = 0; j < csub.size(); ++j) {
            std::vector<std::vector<Int>> minor(k, std::vector<Int>(k));
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) minor[a][b] = dense[rsub[i][a]][csub[j][b]];
            Int dv = det_bareiss(std::move(minor));
            if (dv != 0) ents.push_back({(int32_t)i, (int32_t)j, std::move(dv)});
        }
    return IntMatrix::from_triplets((int)rsub.size(), (int)csub.size(), std::move(ents));
}

long LatticeCochainComplex::rank_at(int deg) const {
    int idx = deg - lo;
    if (idx < 0 || idx >= (int)ranks.size()) return 0;
    return ranks[idx];
}

IntMatrix LatticeCochainComplex::diff_at(int deg) const {
    int idx = deg - lo;
    if (idx >= 0 && idx + 1 < (int)ranks.size()) return diffs[idx];
    return IntMatrix((int)rank_at(deg + 1), (int)rank_at(deg));
}

void LatticeCochainComplex::validate() const {
    if (ranks.empty()) fail("degree-out-of-range", "empty complex");
    if (diffs.size() + 1 != ranks.size()) fail("rank-mismatch", "differential count");
    for (size_t i = 0; i < diffs.size(); ++i) {
        if (diffs[i].cols() != ranks[i] || diffs[i].rows() != ranks[i + 1])
            fail("rank-mismatch", "differential shape at degree " + std::to_string(lo + (int)i));
        if (i + 1 < diffs.size() && !(diffs[i + 1] * diffs[i]).is_zero())
            fail("rank-mismatch", "d o d != 0 at degree " + std::to_string(lo + (int)i));
    }
}

FgAbGroup complex_cohomology(const LatticeCochainComplex& c, int i) {
    if (i < c.lo || i > c.hi()) fail("degree-out-of-range", "H^" + std::to_string(i));
    IntMatrix d_cur = c.diff_at(i);
    IntMatrix d_prev = c.diff_at(i - 1);
    IntMatrix k = hermite_kernel(d_cur);
    IntMatrix y = solve_columns(k, d_prev);
    return cokernel_structure(y);
}

namespace {

/* One side of the two-matrix cancellation workspace. */
struct MorseMat {
    std::vector<SpVec> rows;
    std::vector<int> row_len, col_len;
    std::vector<std::vector<int32_t>> col_rows;
    std::vector<char> row_act, col_act;

    void init(const IntMatrix& m) {
        rows.assign(m.rows(), {});
        row_len.assign(m.rows(), 0);
        col_len.assign(m.cols(), 0);
        col_rows.assign(m.cols(), {});
        row_act.assign(m.rows(), 1);
        col_act.assign(m.cols(), 1);
        for (const auto& e : m.entries()) {
            rows[e.r].emplace_back(e.c, e.v);
            row_len[e.r]++;
            col_len[e.c]++;
            col_rows[e.c].push_back(e.r);
        }
    }

    IntMatrix extract(std::vector<int>& row_ids, std::vector<int>& col_ids) const {
        row_ids.clear();
        col_ids.clear();
        std::vector<int> rmap(rows.size(), -1), cmap(col_len.size(), -1);
        for (size_t r = 0; r < rows.size(); ++r)
            if (row_act[r]) {
                rmap[r] = (int)row_ids.size();
                row_ids.push_back((int)r);
            }
        for (size_t c = 0; c < col_len.size(); ++c)
            if (col_act[c]) {
                cmap[c] = (int)col_ids.size();
                col_ids.push_back((int)c);
            }
        std::vector<IntMatrix::Entry> ents;
        for (size_t r = 0; r < rows.size(); ++r)
            if (row_act[r])
                for (const auto& e : rows[r])
                    if (cmap[e.first] >= 0) ents.push_back({rmap[r], cmap[e.first], e.second});
        return IntMatrix::from_triplets((int)row_ids.size(), (int)col_ids.size(),
                                        std::move(ents));
    }
};

struct Cand {
    long score;
    int which;  // 0: inside d0, 1: inside d1
    int r, c;
    bool operator>(const Cand& o) const { return score > o.score; }
};

}  // namespace

ReducedPair gaussian_reduce_pair(const IntMatrix& d0, const IntMatrix& d1) {
    if (d1.cols() != d0.rows()) fail("rank-mismatch", "pair shapes");
    MorseMat m0, m1;
    m0.init(d0);
    m1.init(d1);

    std::priority_queue<Cand, std::vector<Cand>, std::greater<>> q;
    auto push_unit = [&](int which, MorseMat& m, int r, int c, const Int& v) {
        if (mpz_cmpabs_ui(v.get_mpz_t(), 1) != 0) return;
        long score = (long)(m.row_len[r] - 1) * (long)(m.col_len[c] - 1);
        q.push({score, which, r, c});
    };
    for (size_t r = 0; r < m0.rows.size(); ++r)
        for (const auto& e : m0.rows[r]) push_unit(0, m0, (int)r, e.first, e.second);
    for (size_t r = 0; r < m1.rows.size(); ++r)
        for (const auto& e : m1.rows[r]) push_unit(1, m1, (int)r, e.first, e.second);

    auto axpy = [&](int which, MorseMat& m, int dst, int src, const Int& qv) {
        sp_axpy(m.rows[dst], m.rows[src], qv, [&](int32_t c, bool added) {
            if (added) {
                m.col_len[c]++;
                m.col_rows[c].push_back(dst);
            } else {
                m.col_len[c]--;
            }
        });
        m.row_len[dst] = (int)m.rows[dst].size();
        for (const auto& e : m.rows[dst]) push_unit(which, m, dst, e.first, e.second);
    };

    /* Cancel (row b, col a) of d0: Schur-complement d0 on the +-1 pivot,
     * then drop the middle basis vector b, which deletes column b of d1.
     * Dually for a pivot inside d1. */
    while (!q.empty()) {
        Cand cd = q.top();
        q.pop();
        MorseMat& m = cd.which == 0 ? m0 : m1;
        if (!m.row_act[cd.r] || !m.col_act[cd.c]) continue;
        const Int* pv = sp_find(m.rows[cd.r], cd.c);
        if (!pv || mpz_cmpabs_ui(pv->get_mpz_t(), 1) != 0) continue;
        long score = (long)(m.row_len[cd.r] - 1) * (long)(m.col_len[cd.c] - 1);
        if (score != cd.score) {
            q.push({score, cd.which, cd.r, cd.c});
            continue;
        }
        Int piv = *pv;

        auto live = [&](MorseMat& mm, int c) {
            auto& lst = mm.col_rows[c];
            std::sort(lst.begin(), lst.end());
            lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
            std::vector<int32_t> out;
            for (int32_t r : lst)
                if (mm.row_act[r] && sp_find(mm.rows[r], c)) out.push_back(r);
            lst.assign(out.begin(), out.end());
            return out;
        };

        for (int32_t r : live(m, cd.c)) {
            if (r == cd.r) continue;
            const Int* w = sp_find(m.rows[r], cd.c);
            Int qv = *w / piv;  // piv = +-1
            axpy(cd.which, m, r, cd.r, qv);
        }
        /* Deactivate pivot row/col and the shared middle index. */
        m.row_act[cd.r] = 0;
        m.col_act[cd.c] = 0;
        for (const auto& e : m.rows[cd.r]) m.col_len[e.first]--;
        m.rows[cd.r].clear();
        m.row_len[cd.r] = 0;
        if (cd.which == 0) {
            /* middle index cd.r dies: remove column cd.r of d1 */
            m1.col_act[cd.r] = 0;
            for (int32_t r : live(m1, cd.r)) {
                auto& row = m1.rows[r];
                auto it = std::lower_bound(row.begin(), row.end(), cd.r,
                                           [](const auto& e, int k) { return e.first < k; });
                row.erase(it);
                m1.row_len[r]--;
                m1.col_len[cd.r]--;
                for (const auto& e : row) push_unit(1, m1, r, e.first, e.second);
            }
        } else {
            /* middle index cd.c dies: remove row cd.c of d0 */
            m0.row_act[cd.c] = 0;
            for (const auto& e : m0.rows[cd.c]) m0.col_len[e.first]--;
            m0.rows[cd.c].clear();
            m0.row_len[cd.c] = 0;
        }
    }

    std::vector<int> mid0, a_ids, c_ids, mid1;
    ReducedPair out;
    out.d0 = m0.extract(mid0, a_ids);
    out.d1 = m1.extract(c_ids, mid1);
    /* Row set of d0 and column set of d1 track the same middle basis. */
    if (mid0 != mid1) fail("rank-mismatch", "middle bases diverged");
    return out;
}

FgAbGroup cohomology_of_pair(const IntMatrix& d0, const IntMatrix& d1) {
    if (d1.cols() != d0.rows()) fail("rank-mismatch", "pair shapes");
    if (d0.nnz() + d1.nnz() < 200000 && !(d1 * d0).is_zero())
        fail("rank-mismatch", "pair is not a complex");
    ReducedPair red = gaussian_reduce_pair(d0, d1);
    auto snf0 = smith_normal_form(red.d0, false);
    long rank0 = (long)snf0.diag.size();
    long rank1 = rank(red.d1);
    FgAbGroup g;
    g.free_rank = red.d0.rows() - rank0 - rank1;
    for (auto& d : snf0.diag)
        if (d > 1) g.factors.push_back(d);
    return g;
}

Int FgAbGroup::order() const {
    if (!is_finite()) fail("not-finite", "order of infinite group");
    Int o(1);
    for (const auto& f : factors) o *= f;
    return o;
}

std::string FgAbGroup::to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank == 1) {
        os << "Z";
        first = false;
    } else if (free_rank > 1) {
        os << "Z^" << free_rank;
        first = false;
    }
    for (const auto& f : factors) {
        if (!first) os << " + ";
        os << "Z/" << f.get_str();
        first = false;
    }
    return os.str();
}

}  // namespace binring
