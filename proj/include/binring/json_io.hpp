#pragma once

#include <string>

#include "json.hpp"

#include "binring/binomial.hpp"
#include "binring/int_matrix.hpp"
#include "binring/linalg.hpp"
#include "binring/sheaf.hpp"

namespace binring {

/* Insertion-ordered JSON keeps every emission canonical: identical inputs
 * serialize to identical bytes. */
using Json = nlohmann::ordered_json;

/* Group grammar "Z^r + Z/m1 + Z/m2 + ..." (also plain "Z", "Z/m", "0");
 * arbitrary moduli are folded into invariant-factor form.  All format
 * violations raise "parse-error". */
FgAbGroup parse_group(const std::string& spec);

/* {"free_rank": r, "torsion": [d1, ...]} -- factors that fit a 64-bit int
 * are emitted as numbers, larger ones as decimal strings; both parse. */
Json group_to_json(const FgAbGroup& g);
FgAbGroup group_from_json(const Json& j);

/* {"rows": n, "cols": m, "entries": [[r, c, "v"], ...]} with decimal-string
 * values; entries in row-major order on output. */
Json matrix_to_json(const IntMatrix& m);
IntMatrix matrix_from_json(const Json& j);

/* {"rank": r, "trunc": t, "coords": {"k1,k2": "c", ...}} with dense
 * comma-joined exponent keys in basis order; zero coordinates omitted. */
Json element_to_json(const BinElement& e);
BinElement element_from_json(const Json& j);

/* Scene format for pointed sheaf complexes:
 *   {"cells": [{"id": 0, "dim": 0}, ...],
 *    "incidence": [[tau, sigma, sign], ...],
 *    "sheaf": {"stalks": {"e0": {"<id>": rank, ...}, "e1": {...}},
 *              "restrictions": {"e0": [matrix, ...], "e1": [...]},
 *              "d": {"<id>": matrix, ...}},
 *    "pointing": {"<id>": ["v1", ...], ...}}
 * Cell ids must be exactly 0..n-1; restriction arrays run parallel to
 * "incidence".  The result is fully validated before being returned. */
PointedSheafComplex scene_from_json(const Json& j);

Json parse_json_text(const std::string& text);  // "parse-error" on bad JSON
std::string read_text_file(const std::string& path);

}  // namespace binring
