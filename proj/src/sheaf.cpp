#include "binring/sheaf.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "binring/binomial.hpp"
#include "binring/cosimplicial.hpp"
#include "binring/errors.hpp"

namespace binring {

namespace {

bool same_complex(const CellComplex& a, const CellComplex& b) {
    if (a.cell_count() != b.cell_count()) return false;
    for (int c = 0; c < a.cell_count(); ++c)
        if (a.dim_of(c) != b.dim_of(c)) return false;
    if (a.incidences().size() != b.incidences().size()) return false;
    for (size_t i = 0; i < a.incidences().size(); ++i) {
        const auto& x = a.incidences()[i];
        const auto& y = b.incidences()[i];
        if (x.tau != y.tau || x.sigma != y.sigma || x.sign != y.sign) return false;
    }
    return true;
}

/* Direct faces of every cell: indices into incidences(). */
std::vector<std::vector<int>> faces_of(const CellComplex& base) {
    std::vector<std::vector<int>> out(base.cell_count());
    const auto& incs = base.incidences();
    for (int i = 0; i < (int)incs.size(); ++i) out[incs[i].sigma].push_back(i);
    return out;
}

IntMatrix column_vector(const std::vector<Int>& v) {
    std::vector<IntMatrix::Entry> ents;
    for (int i = 0; i < (int)v.size(); ++i)
        if (v[i] != 0) ents.push_back({i, 0, v[i]});
    return IntMatrix::from_triplets((int)v.size(), 1, ents);
}

}  // namespace

void CellularLatticeSheaf::validate() const {
    if ((int)stalk_rank.size() != base.cell_count())
        fail("rank-mismatch", "one stalk per cell");
    for (long r : stalk_rank)
        if (r < 0) fail("rank-mismatch", "negative stalk rank");
    const auto& incs = base.incidences();
    if (rest.size() != incs.size())
        fail("rank-mismatch", "one restriction per incidence");
    for (size_t i = 0; i < incs.size(); ++i)
        if (rest[i].rows() != stalk_rank[incs[i].sigma] || rest[i].cols() != stalk_rank[incs[i].tau])
            fail("rank-mismatch", "restriction shape does not match its stalks");

    /* Functoriality on codimension-2 pairs: all composites agree. */
    std::vector<std::vector<int>> faces = faces_of(base);
    for (int sigma = 0; sigma < base.cell_count(); ++sigma) {
        std::map<int, IntMatrix> composites;  // tau -> first composite seen
        for (int up : faces[sigma]) {
            const int rho = incs[up].tau;
            for (int down : faces[rho]) {
                const int tau = incs[down].tau;
                IntMatrix comp = rest[up] * rest[down];
                auto it = composites.find(tau);
                if (it == composites.end()) {
                    composites.emplace(tau, std::move(comp));
                } else if (!(it->second == comp)) {
                    fail("sheaf-not-functorial", "codimension-2 composites disagree");
                }
            }
        }
    }
}

const IntMatrix& CellularLatticeSheaf::restriction(int tau, int sigma) const {
    const auto& incs = base.incidences();
    for (size_t i = 0; i < incs.size(); ++i)
        if (incs[i].tau == tau && incs[i].sigma == sigma) return rest[i];
    fail("rank-mismatch", "no restriction for that cell pair");
}

CellularLatticeSheaf constant_sheaf(const CellComplex& base, long rank) {
    CellularLatticeSheaf f{base, std::vector<long>(base.cell_count(), rank), {}};
    f.rest.assign(base.incidences().size(), IntMatrix::identity((int)rank));
    return f;
}

CellularLatticeSheaf circle_local_system(int n, const IntMatrix& monodromy) {
    if (monodromy.rows() != monodromy.cols())
        fail("rank-mismatch", "monodromy must be square");
    for (const Int& d : smith_normal_form(monodromy).diag)
        if (d != 1) fail("rank-mismatch", "monodromy must be invertible over Z");
    CellularLatticeSheaf f = constant_sheaf(CellComplex::circle(n), monodromy.rows());
    /* The wrap edge is the last cell; its head vertex is 0. */
    const auto& incs = f.base.incidences();
    for (size_t i = 0; i < incs.size(); ++i)
        if (incs[i].tau == 0 && incs[i].sigma == 2 * n - 1) f.rest[i] = monodromy;
    return f;
}

CellularLatticeSheaf exterior_power_sheaf(const CellularLatticeSheaf& f, int k) {
    CellularLatticeSheaf out{f.base, {}, {}};
    for (long r : f.stalk_rank) {
        Int b;
        mpz_bin_uiui(b.get_mpz_t(), (unsigned long)r, (unsigned long)k);
        out.stalk_rank.push_back(b.get_si());
    }
    for (const IntMatrix& m : f.rest) out.rest.push_back(exterior_power(m, k));
    return out;
}

LatticeCochainComplex sheaf_cochain_complex(const CellularLatticeSheaf& f) {
    f.validate();
    const CellComplex& base = f.base;
    const int top = base.top_dim();
    LatticeCochainComplex cc;
    cc.lo = 0;
    std::vector<std::vector<long>> offset(top + 1);
    for (int d = 0; d <= top; ++d) {
        long total = 0;
        for (int cell : base.cells_of_dim(d)) {
            offset[d].push_back(total);
            total += f.stalk_rank[cell];
        }
        cc.ranks.push_back(total);
    }
    const auto& incs = base.incidences();
    for (int d = 0; d + 1 <= top; ++d) {
        std::vector<IntMatrix::Entry> ents;
        for (size_t i = 0; i < incs.size(); ++i) {
            const auto& inc = incs[i];
            if (base.dim_of(inc.tau) != d) continue;
            const long r0 = offset[d + 1][base.index_in_dim(inc.sigma)];
            const long c0 = offset[d][base.index_in_dim(inc.tau)];
            for (const auto& en : f.rest[i].entries())
                ents.push_back({(int32_t)(r0 + en.r), (int32_t)(c0 + en.c), en.v * inc.sign});
        }
        cc.diffs.push_back(
            IntMatrix::from_triplets((int)cc.ranks[d + 1], (int)cc.ranks[d], std::move(ents)));
    }
    cc.validate();
    return cc;
}

FgAbGroup sheaf_cohomology(const CellularLatticeSheaf& f, int i) {
    if (i < 0) fail("degree-out-of-range", "negative sheaf degree");
    if (i > f.base.top_dim()) return {};
    return complex_cohomology(sheaf_cochain_complex(f), i);
}

void PointedSheafComplex::validate() const {
    e0.validate();
    e1.validate();
    if (!same_complex(e0.base, e1.base)) fail("rank-mismatch", "the two sheaves share the base");
    const CellComplex& base = e0.base;
    const int n = base.cell_count();
    if ((int)d.size() != n || (int)pointing.size() != n)
        fail("rank-mismatch", "one differential and one pointing per cell");
    for (int c = 0; c < n; ++c) {
        if (d[c].rows() != e1.stalk_rank[c] || d[c].cols() != e0.stalk_rank[c])
            fail("rank-mismatch", "stalk differential shape");
        if ((long)pointing[c].size() != e0.stalk_rank[c])
            fail("rank-mismatch", "pointing length");
        if (!(d[c] * column_vector(pointing[c])).is_zero())
            fail("pointing-not-primitive", "pointing does not lie in the kernel");
        IntMatrix k = hermite_kernel(d[c]);
        if (k.cols() != 1)
            fail("pointing-not-primitive", "stalk kernel is not a line");
        IntMatrix unit = solve_columns(k, column_vector(pointing[c]));
        Int u = unit.at(0, 0);
        if (u != 1 && u != -1)
            fail("pointing-not-primitive", "pointing does not span the kernel");
    }
    const auto& incs = base.incidences();
    for (size_t i = 0; i < incs.size(); ++i) {
        const int tau = incs[i].tau, sigma = incs[i].sigma;
        if (!(e1.rest[i] * d[tau] == d[sigma] * e0.rest[i]))
            fail("rank-mismatch", "restrictions do not commute with the differential");
        if (e0.rest[i].apply(pointing[tau]) != pointing[sigma])
            fail("rank-mismatch", "restrictions do not preserve the pointing");
    }
}

PointedSheafComplex split_model(const CellComplex& base, const CellularLatticeSheaf& l) {
    if (!same_complex(base, l.base)) fail("rank-mismatch", "fiber sheaf lives on another base");
    PointedSheafComplex e{constant_sheaf(base, 1), l, {}, {}};
    for (int c = 0; c < base.cell_count(); ++c) {
        e.d.push_back(IntMatrix((int)l.stalk_rank[c], 1));
        e.pointing.push_back({Int(1)});
    }
    e.validate();
    return e;
}

PointedSheafComplex circle_bundle_model(const CellComplex& base, const std::vector<Int>& euler) {
    if (euler.size() != base.cells_of_dim(2).size())
        fail("rank-mismatch", "one Euler value per 2-cell");
    for (const Int& x : base.coboundary(2).apply(euler))
        if (x != 0) fail("not-a-cocycle", "the Euler cochain has a nonzero coboundary");
    if (base.top_dim() > 2)
        fail("unsupported-size", "circle-bundle stalks over cells of dimension > 2");

    const int n = base.cell_count();
    std::vector<std::vector<int>> faces = faces_of(base);
    const auto& incs = base.incidences();

    /* Closure data per cell: edges and vertices, ascending cell ids. */
    std::vector<std::vector<int>> cl_edges(n), cl_verts(n);
    for (int c = 0; c < n; ++c) {
        std::vector<int> stack = {c};
        std::vector<int> seen;
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            if (std::find(seen.begin(), seen.end(), cur) != seen.end()) continue;
            seen.push_back(cur);
            if (base.dim_of(cur) == 1) cl_edges[c].push_back(cur);
            if (base.dim_of(cur) == 0) cl_verts[c].push_back(cur);
            for (int idx : faces[cur]) stack.push_back(incs[idx].tau);
        }
        std::sort(cl_edges[c].begin(), cl_edges[c].end());
        cl_edges[c].erase(std::unique(cl_edges[c].begin(), cl_edges[c].end()), cl_edges[c].end());
        std::sort(cl_verts[c].begin(), cl_verts[c].end());
        cl_verts[c].erase(std::unique(cl_verts[c].begin(), cl_verts[c].end()), cl_verts[c].end());
    }

    /* E0 basis per cell: u, then h_e for the kept closure edges (2-cells
     * drop their last boundary edge via the face relation); E1 basis:
     * theta_v over closure vertices. */
    std::vector<std::vector<int>> kept(n);
    for (int c = 0; c < n; ++c) {
        kept[c] = cl_edges[c];
        if (base.dim_of(c) == 2) {
            if (kept[c].empty()) fail("rank-mismatch", "2-cell without boundary edges");
            kept[c].pop_back();
        }
    }
    auto h_pos = [&](int cell, int edge) {
        const auto& ks = kept[cell];
        auto it = std::lower_bound(ks.begin(), ks.end(), edge);
        return it != ks.end() && *it == edge ? 1 + (int)(it - ks.begin()) : -1;
    };
    auto theta_pos = [&](int cell, int vert) {
        const auto& vs = cl_verts[cell];
        auto it = std::lower_bound(vs.begin(), vs.end(), vert);
        if (it == vs.end() || *it != vert) fail("rank-mismatch", "vertex outside the closure");
        return (int)(it - vs.begin());
    };
    auto inc_sign = [&](int tau, int sigma) {
        for (int idx : faces[sigma])
            if (incs[idx].tau == tau) return incs[idx].sign;
        fail("rank-mismatch", "missing incidence");
    };

    /* h_e written in the E0 basis of `cell`; for the dropped edge of a
     * 2-cell this applies the relation sum_e [e:f] h_e = euler(f) u. */
    auto h_in_basis = [&](int cell, int edge) {
        std::vector<Int> v((size_t)(1 + kept[cell].size()), Int(0));
        int p = h_pos(cell, edge);
        if (p >= 0) {
            v[p] = 1;
            return v;
        }
        const int s = inc_sign(edge, cell);
        if (s != 1 && s != -1) fail("rank-mismatch", "face relation needs a unit incidence");
        v[0] = euler[base.index_in_dim(cell)] * s;
        for (size_t i = 0; i < kept[cell].size(); ++i)
            v[1 + i] = Int(-inc_sign(kept[cell][i], cell)) * s;
        return v;
    };

    PointedSheafComplex e;
    e.e0.base = base;
    e.e1.base = base;
    for (int c = 0; c < n; ++c) {
        e.e0.stalk_rank.push_back(1 + (long)kept[c].size());
        e.e1.stalk_rank.push_back((long)cl_verts[c].size());
        std::vector<IntMatrix::Entry> ents;
        for (size_t i = 0; i < kept[c].size(); ++i)
            for (int idx : faces[kept[c][i]])
                ents.push_back({theta_pos(c, incs[idx].tau), (int32_t)(1 + i), Int(incs[idx].sign)});
        e.d.push_back(IntMatrix::from_triplets((int)cl_verts[c].size(),
                                               (int)(1 + kept[c].size()), std::move(ents)));
        std::vector<Int> iota((size_t)(1 + kept[c].size()), Int(0));
        iota[0] = 1;
        e.pointing.push_back(std::move(iota));
    }
    for (const auto& inc : incs) {
        std::vector<IntMatrix::Entry> r0;
        r0.push_back({0, 0, Int(1)});
        for (size_t i = 0; i < kept[inc.tau].size(); ++i) {
            std::vector<Int> img = h_in_basis(inc.sigma, kept[inc.tau][i]);
            for (int r = 0; r < (int)img.size(); ++r)
                if (img[r] != 0) r0.push_back({r, (int32_t)(1 + i), img[r]});
        }
        e.e0.rest.push_back(IntMatrix::from_triplets((int)e.e0.stalk_rank[inc.sigma],
                                                     (int)e.e0.stalk_rank[inc.tau], std::move(r0)));
        std::vector<IntMatrix::Entry> r1;
        for (size_t i = 0; i < cl_verts[inc.tau].size(); ++i)
            r1.push_back({theta_pos(inc.sigma, cl_verts[inc.tau][i]), (int32_t)i, Int(1)});
        e.e1.rest.push_back(IntMatrix::from_triplets((int)e.e1.stalk_rank[inc.sigma],
                                                     (int)e.e1.stalk_rank[inc.tau], std::move(r1)));
    }
    e.validate();
    return e;
}

/* ------------------------------------------------------------------ *
 * Coaugmented binomial stalks.
 * ------------------------------------------------------------------ */

long CoaugStalk::size() const {
    Int b;
    mpz_bin_uiui(b.get_mpz_t(), (unsigned long)(rank + trunc), (unsigned long)trunc);
    return b.get_si();
}

CoaugStalk coaug_bin_stalk(const std::vector<Int>& v, int trunc) {
    if (trunc < 0) fail("degree-out-of-range", "negative truncation");
    if (v.empty()) fail("pointing-not-primitive", "pointing in the zero lattice");
    Int g(0);
    for (const Int& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g != 1) fail("pointing-not-primitive", "gcd of the pointing is not one");

    const int n = (int)v.size();
    std::vector<IntMatrix::Entry> row;
    for (int i = 0; i < n; ++i)
        if (v[i] != 0) row.push_back({0, i, v[i]});
    IntMatrix vrow = IntMatrix::from_triplets(1, n, std::move(row));

    CoaugStalk st;
    st.ambient = n;
    st.rank = n - 1;
    st.trunc = trunc;
    st.v = v;
    IntMatrix lam = solve_columns(vrow, IntMatrix::from_dense({{1}}));
    st.base.resize(n);
    for (const auto& en : lam.entries()) st.base[en.r] = en.v;
    st.basis = hermite_kernel(vrow);
    return st;
}

IntMatrix coaug_induced(const CoaugStalk& src, const CoaugStalk& tgt, const IntMatrix& f) {
    if (src.trunc != tgt.trunc) fail("rank-mismatch", "stalk truncations differ");
    if (f.rows() != tgt.ambient || f.cols() != src.ambient)
        fail("rank-mismatch", "pointed map shape");
    if (f.apply(src.v) != tgt.v) fail("rank-mismatch", "map does not respect the pointings");

    IntMatrix ft = f.transpose();
    IntMatrix m = solve_columns(src.basis, ft * tgt.basis);
    std::vector<Int> shift = ft.apply(tgt.base);
    for (int i = 0; i < src.ambient; ++i) shift[i] -= src.base[i];
    IntMatrix cmat = solve_columns(src.basis, column_vector(shift));
    std::vector<Int> c((size_t)src.rank, Int(0));
    for (const auto& en : cmat.entries()) c[en.r] = en.v;
    return affine_induced_map(m, c, src.trunc);
}

/* ------------------------------------------------------------------ *
 * Pushforward cohomology.
 * ------------------------------------------------------------------ */

namespace {

/* Dold-Kan levels of one stalk complex plus the coaugmented stalk and
 * pointing vector at every level. */
struct CellLevels {
    DoldKanLevels dk;
    std::vector<std::vector<Int>> point;  // per level
    std::vector<CoaugStalk> stalk;        // per level
};

CellLevels cell_levels(const PointedSheafComplex& e, int cell, int levels, int trunc) {
    CellLevels out;
    LatticeCochainComplex cx;
    cx.lo = 0;
    cx.ranks = {e.e0.stalk_rank[cell], e.e1.stalk_rank[cell]};
    cx.diffs = {e.d[cell]};
    out.dk = dold_kan_cosimplicial(cx, levels);
    for (int m = 0; m <= levels; ++m) {
        std::vector<Int> v((size_t)out.dk.x.ranks[m], Int(0));
        for (long i = 0; i < e.e0.stalk_rank[cell]; ++i) v[i] = e.pointing[cell][i];
        out.stalk.push_back(coaug_bin_stalk(v, trunc));
        out.point.push_back(std::move(v));
    }
    return out;
}

/* Levelwise cellular restriction X^m(tau) -> X^m(sigma): the block sum of
 * the degree-0 and degree-1 restrictions over matching summands. */
IntMatrix level_restriction(const PointedSheafComplex& e, const CellLevels& src,
                            const CellLevels& tgt, size_t inc_idx, int m) {
    const auto& ssum = src.dk.summands[m];
    const auto& tsum = tgt.dk.summands[m];
    std::vector<IntMatrix::Entry> ents;
    for (size_t i = 0; i < ssum.size(); ++i) {
        if (ssum[i].degree > 1) continue;
        const IntMatrix& rho = ssum[i].degree == 0 ? e.e0.rest[inc_idx] : e.e1.rest[inc_idx];
        for (const auto& en : rho.entries())
            ents.push_back({(int32_t)(tsum[i].offset + en.r), (int32_t)(ssum[i].offset + en.c), en.v});
    }
    return IntMatrix::from_triplets((int)tgt.dk.x.ranks[m], (int)src.dk.x.ranks[m],
                                    std::move(ents));
}

}  // namespace

LatticeCochainComplex pushforward_total_complex(const PointedSheafComplex& e, int trunc,
                                                int top_degree) {
    e.validate();
    if (trunc < 0 || top_degree < 0) fail("degree-out-of-range", "pushforward parameters");
    const CellComplex& base = e.e0.base;
    const int levels = top_degree;

    std::vector<CellLevels> cl;
    for (int c = 0; c < base.cell_count(); ++c)
        cl.push_back(cell_levels(e, c, levels, trunc));

    /* Slot layout of C^n: cells by ascending dimension, level m = n - dim. */
    struct Slot {
        int cell;
        int m;
        long offset;
    };
    std::vector<std::vector<Slot>> slots(top_degree + 1);
    std::vector<std::vector<long>> offset_of(top_degree + 1);
    LatticeCochainComplex cc;
    cc.lo = 0;
    for (int nn = 0; nn <= top_degree; ++nn) {
        offset_of[nn].assign(base.cell_count(), -1);
        long total = 0;
        for (int p = 0; p <= std::min(nn, base.top_dim()); ++p)
            for (int cell : base.cells_of_dim(p)) {
                offset_of[nn][cell] = total;
                slots[nn].push_back({cell, nn - p, total});
                total += cl[cell].stalk[nn - p].size();
            }
        if (total > 200000)
            fail("unsupported-size", "pushforward level exceeds the size budget");
        cc.ranks.push_back(total);
    }

    const auto& incs = base.incidences();
    std::vector<std::vector<int>> cofaces_of(base.cell_count());
    for (int i = 0; i < (int)incs.size(); ++i) cofaces_of[incs[i].tau].push_back(i);

    for (int nn = 0; nn + 1 <= top_degree; ++nn) {
        std::vector<IntMatrix::Entry> ents;
        auto add_block = [&](long r0, long c0, const IntMatrix& m, int scale) {
            for (const auto& en : m.entries())
                ents.push_back({(int32_t)(r0 + en.r), (int32_t)(c0 + en.c), en.v * scale});
        };
        for (const Slot& s : slots[nn]) {
            const int p = base.dim_of(s.cell);
            /* Cellular component, plain sign [tau : sigma]. */
            for (int idx : cofaces_of[s.cell]) {
                const int sigma = incs[idx].sigma;
                IntMatrix block = coaug_induced(cl[s.cell].stalk[s.m], cl[sigma].stalk[s.m],
                                                level_restriction(e, cl[s.cell], cl[sigma], idx, s.m));
                add_block(offset_of[nn + 1][sigma], s.offset, block, incs[idx].sign);
            }
            /* Cosimplicial component, sign (-1)^p on the alternating sum. */
            IntMatrix dm((int)cl[s.cell].stalk[s.m + 1].size(), (int)cl[s.cell].stalk[s.m].size());
            for (int j = 0; j <= s.m + 1; ++j) {
                IntMatrix piece = coaug_induced(cl[s.cell].stalk[s.m], cl[s.cell].stalk[s.m + 1],
                                                cl[s.cell].dk.x.coface[s.m][j]);
                dm = j % 2 == 0 ? dm + piece : dm - piece;
            }
            add_block(offset_of[nn + 1][s.cell], s.offset, dm, p % 2 == 0 ? 1 : -1);
        }
        cc.diffs.push_back(
            IntMatrix::from_triplets((int)cc.ranks[nn + 1], (int)cc.ranks[nn], std::move(ents)));
    }
    return cc;
}

FgAbGroup pushforward_cohomology(const PointedSheafComplex& e, int trunc, int degree) {
    if (degree < 0) fail("degree-out-of-range", "negative total degree");
    auto run = [&](int t) {
        LatticeCochainComplex cc = pushforward_total_complex(e, t, degree + 1);
        return complex_cohomology(cc, degree);
    };
    FgAbGroup at_t = run(trunc);
    FgAbGroup at_next = run(trunc + 1);
    if (!(at_t == at_next))
        fail("truncation-unstable",
             "degree " + std::to_string(degree) + " moves between truncations " +
                 std::to_string(trunc) + " (" + at_t.to_string() + ") and " +
                 std::to_string(trunc + 1) + " (" + at_next.to_string() + ")");
    return at_t;
}

}  // namespace binring
