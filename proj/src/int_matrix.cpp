#include "binring/int_matrix.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace binring {

IntMatrix::IntMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) fail("rank-mismatch", "negative matrix shape");
}

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    m.ents_.reserve(n);
    for (int i = 0; i < n; ++i) m.ents_.push_back({i, i, Int(1)});
    return m;
}

IntMatrix IntMatrix::diagonal(int rows, int cols, const std::vector<Int>& d) {
    IntMatrix m(rows, cols);
    for (size_t i = 0; i < d.size(); ++i) {
        if ((int)i >= rows || (int)i >= cols) fail("rank-mismatch", "diagonal too long");
        if (d[i] != 0) m.ents_.push_back({(int32_t)i, (int32_t)i, d[i]});
    }
    return m;
}

IntMatrix IntMatrix::from_triplets(int rows, int cols, std::vector<Entry> ents) {
    IntMatrix m(rows, cols);
    std::sort(ents.begin(), ents.end(), [](const Entry& a, const Entry& b) {
        return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    for (auto& e : ents) {
        if (e.r < 0 || e.r >= rows || e.c < 0 || e.c >= cols)
            fail("rank-mismatch", "triplet out of shape");
        if (!m.ents_.empty() && m.ents_.back().r == e.r && m.ents_.back().c == e.c)
            m.ents_.back().v += e.v;
        else
            m.ents_.push_back(std::move(e));
    }
    m.ents_.erase(std::remove_if(m.ents_.begin(), m.ents_.end(),
                                 [](const Entry& e) { return e.v == 0; }),
                  m.ents_.end());
    return m;
}

IntMatrix IntMatrix::from_dense(const std::vector<std::vector<long>>& d) {
    int rows = (int)d.size();
    int cols = rows ? (int)d[0].size() : 0;
    IntMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if ((int)d[i].size() != cols) fail("rank-mismatch", "ragged dense matrix");
        for (int j = 0; j < cols; ++j)
            if (d[i][j] != 0) m.ents_.push_back({i, j, Int(d[i][j])});
    }
    return m;
}

Int IntMatrix::at(int r, int c) const {
    auto it = std::lower_bound(ents_.begin(), ents_.end(), std::pair<int, int>(r, c),
                               [](const Entry& e, const std::pair<int, int>& k) {
                                   return e.r != k.first ? e.r < k.first : e.c < k.second;
                               });
    if (it != ents_.end() && it->r == r && it->c == c) return it->v;
    return Int(0);
}

IntMatrix IntMatrix::transpose() const {
    std::vector<Entry> t;
    t.reserve(ents_.size());
    for (const auto& e : ents_) t.push_back({e.c, e.r, e.v});
    return from_triplets(cols_, rows_, std::move(t));
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_) fail("rank-mismatch", "matrix product shapes");
    /* Row starts of o for row-major accumulation. */
    std::vector<size_t> start(o.rows_ + 1, o.ents_.size());
    for (size_t k = o.ents_.size(); k-- > 0;) start[o.ents_[k].r] = k;
    for (int r = o.rows_ - 1; r >= 0; --r)
        if (start[r] == o.ents_.size() || o.ents_[start[r]].r != r) start[r] = start[r + 1];

    IntMatrix out(rows_, o.cols_);
    std::map<int, Int> acc;
    size_t i = 0;
    while (i < ents_.size()) {
        int r = ents_[i].r;
        acc.clear();
        for (; i < ents_.size() && ents_[i].r == r; ++i) {
            int k = ents_[i].c;
            for (size_t j = start[k]; j < start[k + 1]; ++j)
                acc[o.ents_[j].c] += ents_[i].v * o.ents_[j].v;
        }
        for (auto& [c, v] : acc)
            if (v != 0) out.ents_.push_back({r, c, std::move(v)});
    }
    return out;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail("rank-mismatch", "matrix sum shapes");
    IntMatrix out(rows_, cols_);
    size_t a = 0, b = 0;
    auto key = [](const Entry& e) { return std::pair<int, int>(e.r, e.c); };
    while (a < ents_.size() || b < o.ents_.size()) {
        if (b == o.ents_.size() || (a < ents_.size() && key(ents_[a]) < key(o.ents_[b]))) {
            out.ents_.push_back(ents_[a++]);
        } else if (a == ents_.size() || key(o.ents_[b]) < key(ents_[a])) {
            out.ents_.push_back(o.ents_[b++]);
        } else {
            Int v = ents_[a].v + o.ents_[b].v;
            if (v != 0) out.ents_.push_back({ents_[a].r, ents_[a].c, std::move(v)});
            ++a, ++b;
        }
    }
    return out;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const { return *this + o.scaled(Int(-1)); }

IntMatrix IntMatrix::scaled(const Int& s) const {
    IntMatrix out(rows_, cols_);
    if (s == 0) return out;
    out.ents_ = ents_;
    for (auto& e : out.ents_) e.v *= s;
    return out;
}

bool IntMatrix::operator==(const IntMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || ents_.size() != o.ents_.size()) return false;
    for (size_t i = 0; i < ents_.size(); ++i)
        if (ents_[i].r != o.ents_[i].r || ents_[i].c != o.ents_[i].c || ents_[i].v != o.ents_[i].v)
            return false;
    return true;
}

IntMatrix IntMatrix::hstack(const IntMatrix& o) const {
    if (rows_ != o.rows_) fail("rank-mismatch", "hstack row counts");
    std::vector<Entry> ents = ents_;
    for (const auto& e : o.ents_) ents.push_back({e.r, e.c + cols_, e.v});
    return from_triplets(rows_, cols_ + o.cols_, std::move(ents));
}

IntMatrix IntMatrix::vstack(const IntMatrix& o) const {
    if (cols_ != o.cols_) fail("rank-mismatch", "vstack col counts");
    std::vector<Entry> ents = ents_;
    for (const auto& e : o.ents_) ents.push_back({e.r + rows_, e.c, e.v});
    return from_triplets(rows_ + o.rows_, cols_, std::move(ents));
}

IntMatrix IntMatrix::submatrix(const std::vector<int>& rs, const std::vector<int>& cs) const {
    std::vector<int> rmap(rows_, -1), cmap(cols_, -1);
    for (size_t i = 0; i < rs.size(); ++i) rmap.at(rs[i]) = (int)i;
    for (size_t j = 0; j < cs.size(); ++j) cmap.at(cs[j]) = (int)j;
    std::vector<Entry> ents;
    for (const auto& e : ents_)
        if (rmap[e.r] >= 0 && cmap[e.c] >= 0) ents.push_back({rmap[e.r], cmap[e.c], e.v});
    return from_triplets((int)rs.size(), (int)cs.size(), std::move(ents));
}

IntMatrix IntMatrix::select_columns(const std::vector<int>& cs) const {
    std::vector<int> rs(rows_);
    for (int i = 0; i < rows_; ++i) rs[i] = i;
    return submatrix(rs, cs);
}

IntMatrix IntMatrix::select_rows(const std::vector<int>& rs) const {
    std::vector<int> cs(cols_);
    for (int j = 0; j < cols_; ++j) cs[j] = j;
    return submatrix(rs, cs);
}

std::vector<Int> IntMatrix::apply(const std::vector<Int>& x) const {
    if ((int)x.size() != cols_) fail("rank-mismatch", "apply vector length");
    std::vector<Int> y(rows_, Int(0));
    for (const auto& e : ents_) y[e.r] += e.v * x[e.c];
    return y;
}

std::vector<std::vector<Int>> IntMatrix::to_dense() const {
    std::vector<std::vector<Int>> d(rows_, std::vector<Int>(cols_, Int(0)));
    for (const auto& e : ents_) d[e.r][e.c] = e.v;
    return d;
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    auto d = to_dense();
    for (int i = 0; i < rows_; ++i) {
        os << (i ? "\n[" : "[");
        for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << d[i][j].get_str();
        os << "]";
    }
    if (rows_ == 0) os << "[" << rows_ << "x" << cols_ << "]";
    return os.str();
}

}  // namespace binring
