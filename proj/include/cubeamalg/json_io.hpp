#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <cubeamalg/core.hpp>
#include <cubeamalg/cube.hpp>
#include <cubeamalg/digraph.hpp>
#include <cubeamalg/embedding.hpp>
#include <cubeamalg/failure_witness.hpp>
#include <cubeamalg/fraisse.hpp>
#include <cubeamalg/strategy.hpp>
#include <cubeamalg/structure.hpp>
#include <cubeamalg/theta.hpp>
#include <cubeamalg/validation.hpp>

namespace cubeamalg {

using json = nlohmann::json;

inline constexpr int document_version = 1;

/// Canonical bytes of a document: sorted keys (nlohmann's default object
/// ordering), two-space indent, trailing newline. All hashes and determinism
/// checks are over this form.
inline std::string canonical_bytes(const json& j) { return j.dump(2) + "\n"; }

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x00000100000001b3ull;
    }
    return hash;
}

inline std::string hash_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("io", "cannot open " + path + " for writing");
    out << bytes;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("io", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- structures ----

inline std::vector<std::uint32_t> labelset_to_list(LabelSet l) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < 64; ++i)
        if (l >> i & 1) out.push_back(i);
    return out;
}

inline json structure_to_json(const Structure& s) {
    json elements = json::array();
    for (std::size_t i = 0; i < s.elements.size(); ++i) {
        json e;
        e["id"] = s.elements[i];
        e["labels"] = s.labeled() ? json(labelset_to_list(s.labels[i])) : json::array();
        elements.push_back(e);
    }
    json tuples = json::array();
    if (!s.elements.empty()) {
        std::vector<std::uint32_t> pos(s.arity, 0);
        for (;;) {
            json t;
            json ids = json::array();
            for (auto p : pos) ids.push_back(s.elements[p]);
            const TupleEntry& e = s.entry(pos);
            t["t"] = ids;
            t["r"] = e.rel_index;
            t["s"] = e.fn_values;
            tuples.push_back(t);
            if (!next_tuple(pos, s.elements.size())) break;
        }
    }
    json out;
    out["version"] = document_version;
    out["family"] = family_name(s.family);
    out["n"] = s.arity;
    out["L"] = s.label_universe;
    out["elements"] = elements;
    out["tuples"] = tuples;
    return out;
}

namespace detail {

inline bool is_nonneg_integer(const json& j) {
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

inline std::uint64_t require_uint(const json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key) || !is_nonneg_integer(j.at(key)))
        throw input_error("schema-violation", "missing or non-integer field '" + key + "'");
    return j.at(key).get<std::uint64_t>();
}

}  // namespace detail

inline Structure structure_from_json(const json& j) {
    if (!j.is_object()) throw input_error("schema-violation", "structure document must be an object");
    Structure s;
    if (!j.contains("family") || !j.at("family").is_string())
        throw input_error("schema-violation", "missing 'family'");
    auto fam = family_from_name(j.at("family").get<std::string>());
    if (!fam) throw input_error("schema-violation", "unknown family '" +
                                j.at("family").get<std::string>() + "'");
    s.family = *fam;
    s.arity = static_cast<std::uint32_t>(detail::require_uint(j, "n"));
    s.label_universe = static_cast<std::uint32_t>(detail::require_uint(j, "L"));
    if (!j.contains("elements") || !j.at("elements").is_array())
        throw input_error("schema-violation", "missing 'elements' list");
    struct Row {
        ElementId id;
        LabelSet labels;
    };
    std::vector<Row> rows;
    for (const auto& e : j.at("elements")) {
        Row r{static_cast<ElementId>(detail::require_uint(e, "id")), 0};
        if (e.contains("labels")) {
            if (!e.at("labels").is_array())
                throw input_error("schema-violation", "'labels' must be a list");
            for (const auto& l : e.at("labels")) {
                if (!detail::is_nonneg_integer(l))
                    throw input_error("schema-violation", "label indices must be non-negative integers");
                auto idx = l.get<std::uint64_t>();
                if (idx >= s.label_universe)
                    throw input_error("label-range",
                                      "label index " + std::to_string(idx) +
                                          " is outside the configured universe");
                r.labels |= LabelSet{1} << idx;
            }
        }
        rows.push_back(r);
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i].id == rows[i + 1].id)
            throw input_error("schema-violation", "duplicate element id " + std::to_string(rows[i].id));
    for (const auto& r : rows) {
        s.elements.push_back(r.id);
        if (s.label_universe > 0) s.labels.push_back(r.labels);
    }
    if (!j.contains("tuples") || !j.at("tuples").is_array())
        throw input_error("schema-violation", "missing 'tuples' list");
    std::size_t expected = s.elements.empty() ? 0 : 1;
    for (std::uint32_t i = 0; i < s.arity && !s.elements.empty(); ++i) expected *= s.elements.size();
    s.table.resize(expected);
    std::vector<char> seen(expected, 0);
    for (const auto& t : j.at("tuples")) {
        if (!t.is_object() || !t.contains("t") || !t.at("t").is_array())
            throw input_error("schema-violation", "tuple rows need a 't' id list");
        const auto& ids = t.at("t");
        if (ids.size() != s.arity)
            throw input_error("schema-violation", "tuple length differs from the arity");
        std::vector<std::uint32_t> idx(s.arity);
        for (std::uint32_t p = 0; p < s.arity; ++p) {
            if (!detail::is_nonneg_integer(ids[p]))
                throw input_error("schema-violation", "tuple ids must be non-negative integers");
            auto found = s.index_of(static_cast<ElementId>(ids[p].get<std::uint64_t>()));
            if (!found)
                throw input_error("dangling-id", "tuple mentions an id outside the element list");
            idx[p] = *found;
        }
        std::size_t rank = s.rank_of(idx);
        if (seen[rank])
            throw input_error("schema-violation", "duplicate tuple row");
        seen[rank] = 1;
        TupleEntry e;
        e.rel_index = static_cast<std::uint32_t>(detail::require_uint(t, "r"));
        if (!t.contains("s") || !t.at("s").is_array())
            throw input_error("schema-violation", "tuple rows need an 's' value list");
        if (t.at("s").size() != static_cast<std::size_t>(e.rel_index) + 1)
            throw input_error("schema-violation",
                              "tuple stores " + std::to_string(t.at("s").size()) +
                                  " function values for relation index " +
                                  std::to_string(e.rel_index));
        for (const auto& v : t.at("s")) {
            if (!detail::is_nonneg_integer(v))
                throw input_error("schema-violation", "function values must be non-negative integers");
            ElementId id = static_cast<ElementId>(v.get<std::uint64_t>());
            if (!s.contains(id))
                throw input_error("dangling-id",
                                  "function value " + std::to_string(id) +
                                      " is outside the element list");
            e.fn_values.push_back(id);
        }
        s.table[rank] = std::move(e);
    }
    for (std::size_t r = 0; r < expected; ++r)
        if (!seen[r]) throw input_error("non-total-table", "tuple table is missing rows");
    ValidationReport rep = validate_structural(s);
    if (!rep.ok())
        throw input_error("schema-violation", "structural invariants fail: " + rep.summary());
    return s;
}

inline json parse_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw input_error("malformed-json", "input is not valid JSON");
    return j;
}

// ---- element maps ----

inline json map_to_json(const ElementMap& m) {
    json out = json::array();
    for (const auto& [s, t] : m.pairs) out.push_back(json::array({s, t}));
    return out;
}

inline ElementMap map_from_json(const json& j) {
    if (!j.is_array()) throw input_error("schema-violation", "a map is a list of [src,dst] pairs");
    ElementMap m;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !detail::is_nonneg_integer(p[0]) ||
            !detail::is_nonneg_integer(p[1]))
            throw input_error("schema-violation", "map entries are [src,dst] id pairs");
        m.set(static_cast<ElementId>(p[0].get<std::uint64_t>()),
              static_cast<ElementId>(p[1].get<std::uint64_t>()));
    }
    return m;
}

// ---- cubes ----

inline json cube_to_json(const CubeDiagram& c) {
    json faces = json::array();
    for (Face f : c.required_faces()) {
        json row;
        row["mask"] = f;
        row["structure"] = structure_to_json(c.at(f));
        faces.push_back(row);
    }
    json maps = json::array();
    for (Face t : c.required_faces()) {
        for (Face s : subfaces_of(t)) {
            json row;
            row["from"] = s;
            row["to"] = t;
            row["map"] = map_to_json(c.map_at(s, t));
            maps.push_back(row);
        }
    }
    json out;
    out["version"] = document_version;
    out["k"] = c.k;
    out["shape"] = c.shape == CubeShape::full ? "full" : "boundary";
    out["faces"] = faces;
    out["maps"] = maps;
    return out;
}

inline CubeDiagram cube_from_json(const json& j) {
    if (!j.is_object()) throw input_error("schema-violation", "cube document must be an object");
    CubeDiagram c;
    c.k = static_cast<std::uint32_t>(detail::require_uint(j, "k"));
    if (!j.contains("shape") || !j.at("shape").is_string())
        throw input_error("schema-violation", "missing 'shape'");
    std::string shape = j.at("shape").get<std::string>();
    if (shape == "full")
        c.shape = CubeShape::full;
    else if (shape == "boundary")
        c.shape = CubeShape::boundary;
    else
        throw input_error("schema-violation", "shape must be 'full' or 'boundary'");
    if (!j.contains("faces") || !j.at("faces").is_array())
        throw input_error("schema-violation", "missing 'faces'");
    for (const auto& row : j.at("faces")) {
        Face f = static_cast<Face>(detail::require_uint(row, "mask"));
        if (!row.contains("structure"))
            throw input_error("schema-violation", "face rows need a 'structure'");
        c.faces[f] = structure_from_json(row.at("structure"));
    }
    if (!j.contains("maps") || !j.at("maps").is_array())
        throw input_error("schema-violation", "missing 'maps'");
    for (const auto& row : j.at("maps")) {
        Face from = static_cast<Face>(detail::require_uint(row, "from"));
        Face to = static_cast<Face>(detail::require_uint(row, "to"));
        if (!row.contains("map"))
            throw input_error("schema-violation", "map rows need a 'map' pair list");
        c.maps[{from, to}] = map_from_json(row.at("map"));
    }
    for (Face t : c.required_faces()) {
        if (!c.has_face(t))
            throw input_error("missing-face",
                              "face " + std::to_string(t) + " required by the shape is absent");
        for (Face s : subfaces_of(t))
            if (!c.maps.count({s, t}))
                throw input_error("missing-map", "map " + std::to_string(s) + " -> " +
                                                     std::to_string(t) + " is absent");
    }
    return c;
}

// ---- reports, formulas, digraphs, witnesses ----

inline json report_to_json(const ValidationReport& rep) {
    json violations = json::array();
    for (const auto& v : rep.violations) {
        json row;
        row["code"] = v.code;
        row["severity"] = v.severity == Severity::structural ? "structural" : "axiom";
        row["message"] = v.message;
        row["elements"] = v.elements;
        row["faces"] = v.faces;
        violations.push_back(row);
    }
    json out;
    out["valid"] = rep.ok();
    out["violations"] = violations;
    out["notes"] = rep.notes;
    return out;
}

inline json theta_to_json(const ThetaFormula& f) {
    json conjuncts = json::array();
    for (const auto& a : f.inequalities)
        conjuncts.push_back({{"kind", "neq"}, {"lhs", a.lhs}, {"rhs", a.rhs}});
    for (const auto& a : f.relations)
        conjuncts.push_back({{"kind", "rel"}, {"tuple", a.tuple}, {"rel", a.rel_index}});
    for (const auto& a : f.functions)
        conjuncts.push_back(
            {{"kind", "fn"}, {"tuple", a.tuple}, {"fn", a.fn_index}, {"value", a.value}});
    for (const auto& a : f.label_atoms)
        conjuncts.push_back({{"kind", "label"},
                             {"var", a.var},
                             {"label", a.label_index},
                             {"positive", a.positive}});
    json out;
    out["version"] = document_version;
    out["arity"] = f.arity;
    out["variables"] = f.variables;
    out["conjuncts"] = conjuncts;
    return out;
}

inline json digraph_to_json(const EmbeddabilityDigraph& d) {
    json vertices = json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
        json row;
        row["index"] = i;
        row["structure"] = structure_to_json(d.vertices[i]);
        vertices.push_back(row);
    }
    json arcs = json::array();
    for (std::size_t u = 0; u < d.size(); ++u)
        for (std::size_t v = 0; v < d.size(); ++v)
            if (d.arc(u, v)) arcs.push_back(json::array({u, v}));
    json out;
    out["version"] = document_version;
    out["vertices"] = vertices;
    out["arcs"] = arcs;
    return out;
}

inline std::string digraph_to_dot(const EmbeddabilityDigraph& d) {
    std::ostringstream out;
    out << "digraph embeddability {\n  rankdir=BT;\n";
    for (std::size_t i = 0; i < d.size(); ++i)
        out << "  v" << i << " [label=\"#" << i << " (" << d.vertices[i].elements.size()
            << " elements)\"];\n";
    for (std::size_t u = 0; u < d.size(); ++u)
        for (std::size_t v = 0; v < d.size(); ++v)
            if (d.arc(u, v)) out << "  v" << u << " -> v" << v << ";\n";
    out << "}\n";
    return out.str();
}

inline json cube_witness_to_json(const CubeWitness& w) {
    json assignment = json::array();
    for (const auto& [face, vertex] : w.assignment) {
        json row;
        row["mask"] = face;
        row["vertex"] = vertex;
        assignment.push_back(row);
    }
    json out;
    out["k"] = w.k;
    out["assignment"] = assignment;
    return out;
}

inline json failure_witness_to_json(const FailureWitness& w) {
    json out;
    out["version"] = document_version;
    out["found"] = true;
    out["n"] = w.n;
    out["k"] = w.n + 1;
    out["size_cap"] = w.size_cap;
    out["boundary"] = cube_to_json(w.boundary);
    json v;
    v["forced_independent_set"] = w.verification.forced_independent;
    v["sizes_exhausted"] = w.verification.sizes_exhausted;
    v["tables_enumerated"] = w.verification.tables_enumerated;
    out["verification"] = v;
    return out;
}

}  // namespace cubeamalg
