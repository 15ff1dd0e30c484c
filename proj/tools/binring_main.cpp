#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"

#include "binring/binomial.hpp"
#include "binring/em.hpp"
#include "binring/errors.hpp"
#include "binring/json_io.hpp"
#include "binring/sheaf.hpp"
#include "binring/torsion.hpp"

namespace {

using namespace binring;

/* Cache entries are keyed by the canonical request plus this tag; bump it
 * whenever an algorithm change may alter results. */
constexpr const char* kAlgoVersion = "binring-cache-v1";

int parse_nonneg_int(const std::string& s, const char* what) {
    try {
        size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size() || v < 0) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail("parse-error", std::string(what) + " must be a nonnegative integer: " + s);
    }
}

int exit_code_for(const Error& e) {
    std::string c = e.code();
    if (c == "parse-error" || c == "degree-out-of-range") return 2;
    if (c == "truncation-unstable") return 3;
    return 4;
}

/* ---- result cache ----------------------------------------------------- */

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct ResultCache {
    std::string dir;  // empty = disabled

    std::string path_for(const std::string& request) const {
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx",
                      (unsigned long long)fnv1a64(std::string(kAlgoVersion) + "\n" + request));
        return dir + "/" + hex + ".json";
    }

    std::optional<Json> lookup(const std::string& request) const {
        if (dir.empty()) return std::nullopt;
        std::ifstream in(path_for(request), std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream os;
        os << in.rdbuf();
        Json j = Json::parse(os.str(), nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("request") ||
            !j.contains("result") || j["request"] != request)
            return std::nullopt;  // stale or colliding entry: recompute
        return j["result"];
    }

    void store(const std::string& request, const Json& result) const {
        if (dir.empty()) return;
        Json j = Json::object();
        j["version"] = kAlgoVersion;
        j["request"] = request;
        j["result"] = result;
        std::string final_path = path_for(request);
        std::string tmp = final_path + ".tmp." + std::to_string(::getpid());
        std::ofstream out(tmp, std::ios::binary);
        if (!out) return;  // cache is best-effort
        out << j.dump() << "\n";
        out.close();
        std::rename(tmp.c_str(), final_path.c_str());
    }
};

/* ---- worker pool ------------------------------------------------------ */

/* All CLI parallelism lives here; the library stays single-threaded pure.
 * Tasks run in index order per worker; failures rethrow the lowest-index
 * exception after the pool drains so runs are deterministic. */
void run_pool(int jobs, std::vector<std::function<void()>> tasks) {
    if (jobs < 1) jobs = 1;
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(tasks.size());
    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs == 1 || tasks.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs && w < (int)tasks.size(); ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/* ---- rendering --------------------------------------------------------- */

struct DegreeRow {
    int degree = 0;
    FgAbGroup h;
    int trunc_used = 0;
};

Json row_json(const DegreeRow& r) {
    Json j = group_to_json(r.h);
    j["trunc_used"] = r.trunc_used;
    return j;
}

std::string torsion_csv(const FgAbGroup& g) {
    std::string s;
    for (size_t i = 0; i < g.factors.size(); ++i)
        s += (i ? ";" : "") + g.factors[i].get_str();
    return s;
}

void render_rows(const std::string& format, const std::vector<DegreeRow>& rows) {
    if (format == "json") {
        Json doc = Json::object();
        for (const auto& r : rows) doc[std::to_string(r.degree)] = row_json(r);
        std::cout << doc.dump() << "\n";
    } else if (format == "csv") {
        std::cout << "degree,trunc,free_rank,torsion\n";
        for (const auto& r : rows)
            std::cout << r.degree << "," << r.trunc_used << "," << r.h.free_rank << ","
                      << torsion_csv(r.h) << "\n";
    } else {
        for (const auto& r : rows)
            std::cout << "H^" << r.degree << " = " << r.h.to_string() << "\t"
                      << row_json(r).dump() << "\n";
    }
}

void render_group(const std::string& format, const FgAbGroup& g) {
    if (format == "json")
        std::cout << group_to_json(g).dump() << "\n";
    else if (format == "csv")
        std::cout << "free_rank,torsion\n"
                  << g.free_rank << "," << torsion_csv(g) << "\n";
    else
        std::cout << g.to_string() << "\t" << group_to_json(g).dump() << "\n";
}

/* ---- shared options ---------------------------------------------------- */

struct CommonOpts {
    std::string format = "table";
    int jobs = 1;
    std::string cache_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--jobs", o.jobs, "Worker pool size")->check(CLI::PositiveNumber);
    const char* env = std::getenv("BINRING_CACHE_DIR");
    if (env) o.cache_dir = env;
    cmd->add_option("--cache", o.cache_dir,
                    "Cache directory (default: $BINRING_CACHE_DIR if set)");
}

std::optional<int> parse_trunc_flag(const std::string& trunc) {
    if (trunc == "auto") return std::nullopt;
    try {
        size_t used = 0;
        int t = std::stoi(trunc, &used);
        if (used != trunc.size() || t < 0) throw std::invalid_argument(trunc);
        return t;
    } catch (const std::exception&) {
        fail("parse-error", "--trunc expects a nonnegative integer or 'auto'");
    }
}

DegreeRow cached_degree(const ResultCache& cache, const std::string& request,
                        const std::function<DegreeRow()>& compute) {
    if (auto hit = cache.lookup(request)) {
        DegreeRow r;
        r.h = group_from_json(*hit);
        r.trunc_used = (int)(*hit)["trunc_used"].get<long long>();
        r.degree = (int)(*hit)["degree"].get<long long>();
        return r;
    }
    DegreeRow r = compute();
    Json stored = row_json(r);
    stored["degree"] = r.degree;
    cache.store(request, stored);
    return r;
}

/* ---- subcommands ------------------------------------------------------- */

int run_em(const std::string& group, int n, int max_degree, const std::string& trunc,
           const CommonOpts& opts) {
    FgAbGroup a = parse_group(group);
    std::optional<int> fixed = parse_trunc_flag(trunc);
    ResultCache cache{opts.cache_dir};
    std::vector<DegreeRow> rows(max_degree + 1);
    std::vector<std::function<void()>> tasks;
    for (int i = 0; i <= max_degree; ++i)
        tasks.push_back([&, i] {
            std::string request = "em|group=" + a.to_string() + "|n=" + std::to_string(n) +
                                  "|i=" + std::to_string(i) + "|trunc=" + trunc;
            rows[i] = cached_degree(cache, request, [&]() -> DegreeRow {
                EmResult res = em_cohomology(a, n, i, fixed);
                return {i, res.h, res.trunc_used};
            });
        });
    run_pool(opts.jobs, std::move(tasks));
    render_rows(opts.format, rows);
    return 0;
}

int run_phi(const std::string& group, int t, bool with_oracle, const CommonOpts& opts) {
    FgAbGroup a = parse_group(group);
    ResultCache cache{opts.cache_dir};
    std::string request = "phi|group=" + a.to_string() + "|t=" + std::to_string(t);
    FgAbGroup result;
    if (auto hit = cache.lookup(request)) {
        result = group_from_json(*hit);
    } else {
        result = phi(a, t);
        cache.store(request, group_to_json(result));
    }
    if (with_oracle) {
        if (a.free_rank != 0 || a.factors.size() != 1)
            fail("parse-error", "--oracle needs a cyclic group of prime order");
        FgAbGroup expectation = cyclotomic_phi_oracle(a.factors[0], t);
        if (!(expectation == result))
            fail("rank-mismatch", "cyclotomic oracle disagrees: computed " + result.to_string() +
                                      ", oracle " + expectation.to_string());
    }
    render_group(opts.format, result);
    return 0;
}

int run_fibration(const std::string& input, int max_degree, const std::string& trunc,
                  const CommonOpts& opts) {
    Json scene_json = parse_json_text(read_text_file(input));
    PointedSheafComplex scene = scene_from_json(scene_json);
    std::optional<int> fixed = parse_trunc_flag(trunc);
    std::string canon = scene_json.dump();
    ResultCache cache{opts.cache_dir};
    std::vector<DegreeRow> rows(max_degree + 1);
    std::vector<std::function<void()>> tasks;
    for (int i = 0; i <= max_degree; ++i)
        tasks.push_back([&, i] {
            int t = fixed ? *fixed : std::max(i, 1);
            std::string request = "fibration|scene=" + canon + "|i=" + std::to_string(i) +
                                  "|trunc=" + std::to_string(t);
            rows[i] = cached_degree(cache, request, [&]() -> DegreeRow {
                return {i, pushforward_cohomology(scene, t, i), t};
            });
        });
    run_pool(opts.jobs, std::move(tasks));
    render_rows(opts.format, rows);
    return 0;
}

int run_snf(const std::string& input, const CommonOpts& opts) {
    Json mj = parse_json_text(read_text_file(input));
    IntMatrix m = matrix_from_json(mj);
    ResultCache cache{opts.cache_dir};
    std::string request = "snf|matrix=" + mj.dump();
    Json diag_json;
    if (auto hit = cache.lookup(request)) {
        diag_json = *hit;
    } else {
        SmithResult s = smith_normal_form(m);
        diag_json = Json::array();
        for (const auto& d : s.diag) diag_json.push_back(d.get_str());
        cache.store(request, diag_json);
    }
    if (opts.format == "json") {
        Json doc = Json::object();
        doc["diagonal"] = diag_json;
        std::cout << doc.dump() << "\n";
    } else if (opts.format == "csv") {
        std::cout << "diagonal\n";
        for (size_t i = 0; i < diag_json.size(); ++i)
            std::cout << diag_json[i].get<std::string>() << (i + 1 < diag_json.size() ? ";" : "");
        std::cout << "\n";
    } else {
        for (size_t i = 0; i < diag_json.size(); ++i)
            std::cout << (i ? " " : "") << diag_json[i].get<std::string>();
        std::cout << "\n";
    }
    return 0;
}

BinElement element_from_file(const std::string& path) {
    return element_from_json(parse_json_text(read_text_file(path)));
}

/* expand reads the shared element JSON shape, interpreting "coords" as
 * monomial coefficients keyed by exponent vector, and emits the same shape
 * with "coords" in the binomial basis. */
int run_bin_expand(const std::string& input) {
    Json j = parse_json_text(read_text_file(input));
    if (!j.is_object() || !j.contains("rank") || !j.contains("trunc") || !j.contains("coords"))
        fail("parse-error", "expand input needs rank, trunc, coords");
    int rank = (int)j["rank"].get<long long>();
    int trunc = (int)j["trunc"].get<long long>();
    if (rank <= 0 || trunc < 0) fail("parse-error", "rank must be positive, trunc nonnegative");
    std::vector<std::pair<MultiIndex, Int>> poly;
    for (const auto& [key, val] : j["coords"].items()) {
        std::vector<int> dense;
        std::istringstream is(key);
        std::string part;
        while (std::getline(is, part, ','))
            dense.push_back(parse_nonneg_int(part, "monomial exponent"));
        if ((int)dense.size() != rank) fail("parse-error", "monomial key arity: " + key);
        poly.emplace_back(MultiIndex::from_dense(dense),
                          val.is_string() ? Int(val.get<std::string>())
                                          : Int((long)val.get<long long>()));
    }
    std::cout << element_to_json(sym_to_bin(poly, rank, trunc)).dump() << "\n";
    return 0;
}

int run_bin_mul(const std::string& a_path, const std::string& b_path) {
    std::cout << element_to_json(multiply(element_from_file(a_path), element_from_file(b_path)))
                     .dump()
              << "\n";
    return 0;
}

int run_bin_comul(const std::string& input) {
    BinElement e = element_from_file(input);
    BinTensor t = comultiply(e);
    /* Tensor coordinates concatenate to an element of twice the rank. */
    TruncatedBinAlgebra alg(e.rank, e.trunc);
    BinElement out = zero_element(2 * e.rank, e.trunc);
    TruncatedBinAlgebra big(2 * e.rank, e.trunc);
    for (const auto& [l, r, c] : t.coords) {
        std::vector<int> dense = alg.index_at(l).to_dense(e.rank);
        std::vector<int> rd = alg.index_at(r).to_dense(e.rank);
        dense.insert(dense.end(), rd.begin(), rd.end());
        long pos = big.position(MultiIndex::from_dense(dense));
        if (pos < 0) fail("rank-mismatch", "comultiplication escaped the truncation");
        out.coords[pos] += c;
    }
    std::cout << element_to_json(out).dump() << "\n";
    return 0;
}

int run_bin_compose(const std::string& input, int rank, int inner, int outer) {
    BinElement e = element_from_file(input);
    TruncatedBinAlgebra inner_alg(rank, inner);
    if (e.rank != (int)inner_alg.size() || e.trunc != outer)
        fail("parse-error", "compose input must live on the inner basis at the outer truncation");
    IntMatrix comp = monad_compose(rank, inner, outer);
    std::vector<Int> coords = comp.apply(e.coords);
    BinElement out;
    out.rank = rank;
    out.trunc = inner * outer;
    out.coords = std::move(coords);
    std::cout << element_to_json(out).dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact cohomology of truncated binomial models"};
    app.require_subcommand(1);

    /* em */
    auto* em = app.add_subcommand("em", "Cohomology of an Eilenberg-MacLane space");
    std::string em_group;
    int em_n = 1, em_maxdeg = 0;
    std::string em_trunc = "auto";
    CommonOpts em_opts;
    em->add_option("--group", em_group, "Group spec, e.g. 'Z' or 'Z/4 + Z/2'")->required();
    em->add_option("--n", em_n, "Degree of the Eilenberg-MacLane space")->required();
    em->add_option("--max-degree", em_maxdeg, "Largest cohomological degree")->required();
    em->add_option("--trunc", em_trunc, "Truncation: nonnegative integer or 'auto'")
        ->capture_default_str();
    add_common(em, em_opts);

    /* phi */
    auto* phi_cmd = app.add_subcommand("phi", "Torsion functor of a finite group");
    std::string phi_group;
    int phi_t = 0;
    bool phi_oracle = false;
    CommonOpts phi_opts;
    phi_cmd->add_option("--group", phi_group, "Finite group spec")->required();
    phi_cmd->add_option("--t", phi_t, "Filtration stage")->required();
    phi_cmd->add_flag("--oracle", phi_oracle, "Cross-check prime cyclic inputs");
    add_common(phi_cmd, phi_opts);

    /* fibration */
    auto* fib = app.add_subcommand("fibration", "Cohomology of a pointed-sheaf scene");
    std::string fib_input;
    int fib_maxdeg = 0;
    std::string fib_trunc = "auto";
    CommonOpts fib_opts;
    fib->add_option("--input", fib_input, "Scene JSON file")->required();
    fib->add_option("--max-degree", fib_maxdeg, "Largest cohomological degree")->required();
    fib->add_option("--trunc", fib_trunc, "Truncation: nonnegative integer or 'auto'")
        ->capture_default_str();
    add_common(fib, fib_opts);

    /* bin */
    auto* bin = app.add_subcommand("bin", "Truncated binomial algebra operations");
    bin->require_subcommand(1);
    auto* bexpand = bin->add_subcommand("expand", "Monomial polynomial to binomial basis");
    std::string bexpand_input;
    bexpand->add_option("--input", bexpand_input, "Polynomial JSON file")->required();
    auto* bmul = bin->add_subcommand("mul", "Product of two elements");
    std::string bmul_a, bmul_b;
    bmul->add_option("--a", bmul_a, "Left element JSON file")->required();
    bmul->add_option("--b", bmul_b, "Right element JSON file")->required();
    auto* bcomul = bin->add_subcommand("comul", "Comultiplication of an element");
    std::string bcomul_input;
    bcomul->add_option("--input", bcomul_input, "Element JSON file")->required();
    auto* bcompose = bin->add_subcommand("compose", "Monad composition of a layered element");
    std::string bcompose_input;
    int bcompose_rank = 1, bcompose_inner = 1, bcompose_outer = 1;
    bcompose->add_option("--input", bcompose_input, "Element JSON file")->required();
    bcompose->add_option("--rank", bcompose_rank, "Base lattice rank")->required();
    bcompose->add_option("--inner", bcompose_inner, "Inner truncation")->required();
    bcompose->add_option("--outer", bcompose_outer, "Outer truncation")->required();

    /* snf */
    auto* snf = app.add_subcommand("snf", "Smith normal form of a JSON matrix");
    std::string snf_input;
    CommonOpts snf_opts;
    snf->add_option("--input", snf_input, "Matrix JSON file")->required();
    add_common(snf, snf_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (em->parsed()) return run_em(em_group, em_n, em_maxdeg, em_trunc, em_opts);
        if (phi_cmd->parsed()) return run_phi(phi_group, phi_t, phi_oracle, phi_opts);
        if (fib->parsed()) return run_fibration(fib_input, fib_maxdeg, fib_trunc, fib_opts);
        if (snf->parsed()) return run_snf(snf_input, snf_opts);
        if (bin->parsed()) {
            if (bexpand->parsed()) return run_bin_expand(bexpand_input);
            if (bmul->parsed()) return run_bin_mul(bmul_a, bmul_b);
            if (bcomul->parsed()) return run_bin_comul(bcomul_input);
            if (bcompose->parsed())
                return run_bin_compose(bcompose_input, bcompose_rank, bcompose_inner,
                                       bcompose_outer);
        }
        std::cerr << "binring: no subcommand\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "binring: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "binring: internal error: " << e.what() << "\n";
        return 4;
    }
}
