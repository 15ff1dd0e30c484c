#include "binring/json_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "binring/errors.hpp"

namespace binring {

namespace {

std::string trimmed(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Int parse_int(const std::string& s, const std::string& what) {
    std::string t = trimmed(s);
    if (t.empty()) fail("parse-error", "empty " + what);
    size_t start = t[0] == '-' || t[0] == '+' ? 1 : 0;
    if (start == t.size()) fail("parse-error", "bare sign in " + what);
    for (size_t i = start; i < t.size(); ++i)
        if (!isdigit((unsigned char)t[i])) fail("parse-error", "bad digit in " + what + ": " + t);
    return Int(t);
}

Int int_from_json(const Json& j, const std::string& what) {
    if (j.is_string()) return parse_int(j.get<std::string>(), what);
    if (j.is_number_integer()) return Int((long)j.get<long long>());
    fail("parse-error", what + " must be an integer or decimal string");
}

long small_from_json(const Json& j, const std::string& what) {
    if (!j.is_number_integer()) fail("parse-error", what + " must be an integer");
    return (long)j.get<long long>();
}

Json number_or_string(const Int& v) {
    if (v.fits_slong_p()) return Json(v.get_si());
    return Json(v.get_str());
}

}  // namespace

FgAbGroup parse_group(const std::string& spec) {
    std::vector<Int> moduli;
    long free_rank = 0;
    std::string s = spec;
    size_t pos = 0;
    bool any = false;
    while (pos <= s.size()) {
        size_t plus = s.find('+', pos);
        std::string tok = trimmed(s.substr(pos, plus == std::string::npos ? plus : plus - pos));
        pos = plus == std::string::npos ? s.size() + 1 : plus + 1;
        if (tok.empty()) {
            if (any && plus == std::string::npos) break;
            fail("parse-error", "empty summand in group spec: " + spec);
        }
        any = true;
        if (tok == "0") continue;
        if (tok == "Z") {
            ++free_rank;
        } else if (tok.rfind("Z^", 0) == 0) {
            Int r = parse_int(tok.substr(2), "free rank");
            if (r < 1) fail("parse-error", "free rank must be positive: " + tok);
            free_rank += r.get_si();
        } else if (tok.rfind("Z/", 0) == 0) {
            Int m = parse_int(tok.substr(2), "modulus");
            if (m < 2) fail("parse-error", "modulus must be at least 2: " + tok);
            moduli.push_back(m);
        } else {
            fail("parse-error", "unrecognized summand: " + tok);
        }
    }
    if (!any) fail("parse-error", "empty group spec");

    /* Fold arbitrary moduli into the invariant-factor chain. */
    int k = (int)moduli.size();
    FgAbGroup g = cokernel_structure(IntMatrix::diagonal(k, k, moduli));
    g.free_rank = free_rank;
    return g;
}

Json group_to_json(const FgAbGroup& g) {
    Json j = Json::object();
    j["free_rank"] = g.free_rank;
    Json torsion = Json::array();
    for (const auto& f : g.factors) torsion.push_back(number_or_string(f));
    j["torsion"] = std::move(torsion);
    return j;
}

FgAbGroup group_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("free_rank") || !j.contains("torsion"))
        fail("parse-error", "group JSON needs free_rank and torsion");
    FgAbGroup g;
    g.free_rank = small_from_json(j["free_rank"], "free_rank");
    if (g.free_rank < 0) fail("parse-error", "negative free rank");
    if (!j["torsion"].is_array()) fail("parse-error", "torsion must be an array");
    for (const auto& f : j["torsion"]) g.factors.push_back(int_from_json(f, "torsion factor"));
    for (size_t i = 0; i < g.factors.size(); ++i) {
        if (g.factors[i] < 2) fail("parse-error", "torsion factor below 2");
        if (i > 0 && g.factors[i] % g.factors[i - 1] != 0)
            fail("parse-error", "torsion factors must form a divisibility chain");
    }
    return g;
}

Json matrix_to_json(const IntMatrix& m) {
    Json j = Json::object();
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    Json entries = Json::array();
    for (const auto& en : m.entries())
        entries.push_back(Json::array({en.r, en.c, en.v.get_str()}));
    j["entries"] = std::move(entries);
    return j;
}

IntMatrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        fail("parse-error", "matrix JSON needs rows, cols, entries");
    long rows = small_from_json(j["rows"], "rows");
    long cols = small_from_json(j["cols"], "cols");
    if (rows < 0 || cols < 0) fail("parse-error", "negative matrix shape");
    if (!j["entries"].is_array()) fail("parse-error", "entries must be an array");
    std::vector<IntMatrix::Entry> es;
    for (const auto& en : j["entries"]) {
        if (!en.is_array() || en.size() != 3)
            fail("parse-error", "matrix entry must be [row, col, value]");
        long r = small_from_json(en[0], "entry row");
        long c = small_from_json(en[1], "entry col");
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            fail("parse-error", "matrix entry out of range");
        es.push_back({(int32_t)r, (int32_t)c, int_from_json(en[2], "entry value")});
    }
    return IntMatrix::from_triplets((int)rows, (int)cols, std::move(es));
}

Json element_to_json(const BinElement& e) {
    TruncatedBinAlgebra alg(e.rank, e.trunc);
    if ((long)e.coords.size() != alg.size()) fail("rank-mismatch", "element coordinate count");
    Json j = Json::object();
    j["rank"] = e.rank;
    j["trunc"] = e.trunc;
    Json coords = Json::object();
    for (long p = 0; p < alg.size(); ++p)
        if (e.coords[p] != 0) coords[alg.index_at(p).to_string(e.rank)] = e.coords[p].get_str();
    j["coords"] = std::move(coords);
    return j;
}

BinElement element_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("rank") || !j.contains("trunc") || !j.contains("coords"))
        fail("parse-error", "element JSON needs rank, trunc, coords");
    long rank = small_from_json(j["rank"], "rank");
    long trunc = small_from_json(j["trunc"], "trunc");
    if (rank < 0 || trunc < 0) fail("parse-error", "negative rank or trunc");
    if (!j["coords"].is_object()) fail("parse-error", "coords must be an object");
    BinElement e = zero_element((int)rank, (int)trunc);
    TruncatedBinAlgebra alg((int)rank, (int)trunc);
    for (const auto& [key, val] : j["coords"].items()) {
        std::vector<int> dense;
        std::istringstream is(key);
        std::string part;
        while (std::getline(is, part, ','))
            dense.push_back((int)parse_int(part, "exponent").get_si());
        if ((long)dense.size() != rank) fail("parse-error", "exponent key arity: " + key);
        for (int k : dense)
            if (k < 0) fail("parse-error", "negative exponent: " + key);
        long pos = alg.position(MultiIndex::from_dense(dense));
        if (pos < 0) fail("parse-error", "exponent key beyond truncation: " + key);
        e.coords[pos] = int_from_json(val, "coordinate");
    }
    return e;
}

PointedSheafComplex scene_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("cells") || !j.contains("incidence") ||
        !j.contains("sheaf") || !j.contains("pointing"))
        fail("parse-error", "scene JSON needs cells, incidence, sheaf, pointing");
    if (!j["cells"].is_array()) fail("parse-error", "cells must be an array");
    long n = (long)j["cells"].size();
    std::vector<int> dims(n, -1);
    for (const auto& cell : j["cells"]) {
        if (!cell.is_object() || !cell.contains("id") || !cell.contains("dim"))
            fail("parse-error", "cell needs id and dim");
        long id = small_from_json(cell["id"], "cell id");
        if (id < 0 || id >= n) fail("parse-error", "cell ids must cover 0..n-1");
        if (dims[id] >= 0) fail("parse-error", "duplicate cell id");
        dims[id] = (int)small_from_json(cell["dim"], "cell dim");
    }

    if (!j["incidence"].is_array()) fail("parse-error", "incidence must be an array");
    std::vector<CellComplex::Incidence> incs;
    for (const auto& row : j["incidence"]) {
        if (!row.is_array() || row.size() != 3)
            fail("parse-error", "incidence row must be [tau, sigma, sign]");
        incs.push_back({(int)small_from_json(row[0], "tau"),
                        (int)small_from_json(row[1], "sigma"),
                        (int)small_from_json(row[2], "sign")});
    }
    CellComplex base(dims, incs);

    const Json& sheaf = j["sheaf"];
    if (!sheaf.is_object() || !sheaf.contains("stalks") || !sheaf.contains("restrictions") ||
        !sheaf.contains("d"))
        fail("parse-error", "sheaf JSON needs stalks, restrictions, d");
    auto read_layer = [&](const std::string& name) {
        const Json& stalks = sheaf["stalks"];
        const Json& rests = sheaf["restrictions"];
        if (!stalks.is_object() || !stalks.contains(name) || !rests.is_object() ||
            !rests.contains(name))
            fail("parse-error", "sheaf layer missing: " + name);
        CellularLatticeSheaf f;
        f.base = base;
        f.stalk_rank.assign(n, -1);
        for (const auto& [key, val] : stalks[name].items()) {
            Int id = parse_int(key, "stalk key");
            if (id < 0 || id >= n) fail("parse-error", "stalk key out of range: " + key);
            f.stalk_rank[id.get_si()] = small_from_json(val, "stalk rank");
        }
        for (long c = 0; c < n; ++c)
            if (f.stalk_rank[c] < 0) fail("parse-error", "missing stalk rank in " + name);
        if (!rests[name].is_array() || rests[name].size() != incs.size())
            fail("parse-error", "restrictions must run parallel to incidence");
        for (const auto& m : rests[name]) f.rest.push_back(matrix_from_json(m));
        return f;
    };

    PointedSheafComplex e;
    e.e0 = read_layer("e0");
    e.e1 = read_layer("e1");
    const Json& dmap = sheaf["d"];
    if (!dmap.is_object()) fail("parse-error", "sheaf d must be an object");
    e.d.assign(n, IntMatrix(0, 0));
    std::vector<bool> seen(n, false);
    for (const auto& [key, val] : dmap.items()) {
        Int id = parse_int(key, "d key");
        if (id < 0 || id >= n) fail("parse-error", "d key out of range: " + key);
        e.d[id.get_si()] = matrix_from_json(val);
        seen[id.get_si()] = true;
    }
    for (long c = 0; c < n; ++c)
        if (!seen[c]) fail("parse-error", "missing differential for a cell");

    const Json& pointing = j["pointing"];
    if (!pointing.is_object()) fail("parse-error", "pointing must be an object");
    e.pointing.assign(n, {});
    for (const auto& [key, val] : pointing.items()) {
        Int id = parse_int(key, "pointing key");
        if (id < 0 || id >= n) fail("parse-error", "pointing key out of range: " + key);
        if (!val.is_array()) fail("parse-error", "pointing vector must be an array");
        for (const auto& v : val)
            e.pointing[id.get_si()].push_back(int_from_json(v, "pointing entry"));
    }
    for (long c = 0; c < n; ++c)
        if ((long)e.pointing[c].size() != e.e0.stalk_rank[c])
            fail("parse-error", "pointing length must match the e0 stalk");

    e.validate();
    return e;
}

Json parse_json_text(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) fail("parse-error", "malformed JSON");
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("parse-error", "cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace binring
