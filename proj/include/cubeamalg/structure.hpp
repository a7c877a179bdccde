#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <cubeamalg/core.hpp>
#include <cubeamalg/validation.hpp>

namespace cubeamalg {

enum class Family { bkl, sets, graphs };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::bkl: return "bkl";
        case Family::sets: return "sets";
        case Family::graphs: return "graphs";
    }
    return "?";
}

inline std::optional<Family> family_from_name(const std::string& s) {
    if (s == "bkl") return Family::bkl;
    if (s == "sets") return Family::sets;
    if (s == "graphs") return Family::graphs;
    return std::nullopt;
}

/// Compressed table entry for one n-tuple: the unique relation index j holding
/// of the tuple, plus the function values s_0..s_j. For i > j the value of s_i
/// is the tuple's first coordinate and is not stored.
struct TupleEntry {
    std::uint32_t rel_index = 0;
    std::vector<ElementId> fn_values;  // length rel_index + 1

    friend bool operator==(const TupleEntry&, const TupleEntry&) = default;
};

/// A finite structure with a total tuple table over elements^arity. Elements
/// carry global ids (never renumbered), the table is indexed by the rank of the
/// index tuple in lexicographic order. Labels, when the label universe L > 0,
/// assign each element a subset of {0,...,L-1}.
struct Structure {
    Family family = Family::bkl;
    std::uint32_t arity = 1;
    std::uint32_t label_universe = 0;  // L; 0 means unlabeled
    std::vector<ElementId> elements;   // strictly increasing
    std::vector<TupleEntry> table;     // size() == elements.size()^arity
    std::vector<LabelSet> labels;      // size() == elements.size() when labeled, else empty

    bool labeled() const { return label_universe > 0; }
    std::size_t size() const { return elements.size(); }
    bool empty() const { return elements.empty(); }

    std::size_t tuple_count() const {
        std::size_t c = 1;
        for (std::uint32_t i = 0; i < arity; ++i) c *= elements.size();
        return elements.empty() ? 0 : c;
    }

    std::optional<std::uint32_t> index_of(ElementId id) const {
        auto it = std::lower_bound(elements.begin(), elements.end(), id);
        if (it == elements.end() || *it != id) return std::nullopt;
        return static_cast<std::uint32_t>(it - elements.begin());
    }

    bool contains(ElementId id) const { return index_of(id).has_value(); }

    std::size_t rank_of(std::span<const std::uint32_t> idx_tuple) const {
        std::size_t r = 0;
        for (std::uint32_t i : idx_tuple) r = r * elements.size() + i;
        return r;
    }

    std::vector<std::uint32_t> tuple_at_rank(std::size_t rank) const {
        std::vector<std::uint32_t> t(arity, 0);
        for (std::uint32_t p = arity; p-- > 0;) {
            t[p] = static_cast<std::uint32_t>(rank % elements.size());
            rank /= elements.size();
        }
        return t;
    }

    const TupleEntry& entry(std::span<const std::uint32_t> idx_tuple) const {
        return table[rank_of(idx_tuple)];
    }

    TupleEntry& entry(std::span<const std::uint32_t> idx_tuple) {
        return table[rank_of(idx_tuple)];
    }

    /// Value of s_i on the tuple, honoring the compression rule s_i = first
    /// coordinate for i beyond the stored relation index.
    ElementId fn_value(std::span<const std::uint32_t> idx_tuple, std::uint32_t i) const {
        const TupleEntry& e = entry(idx_tuple);
        if (i <= e.rel_index) return e.fn_values[i];
        return elements[idx_tuple[0]];
    }

    LabelSet label_of_index(std::uint32_t idx) const {
        return labels.empty() ? 0 : labels[idx];
    }

    friend bool operator==(const Structure&, const Structure&) = default;
};

/// Advance an index odometer over elements^arity; returns false after the last tuple.
inline bool next_tuple(std::vector<std::uint32_t>& t, std::size_t n_elements) {
    for (std::size_t p = t.size(); p-- > 0;) {
        if (++t[p] < n_elements) return true;
        t[p] = 0;
    }
    return false;
}

/// Structural well-formedness: the representation-level invariants (B1 totality
/// and B2 compression are enforced by the table shape and re-checked here).
inline ValidationReport validate_structural(const Structure& s) {
    ValidationReport rep;
    if (s.arity == 0) {
        rep.add({"arity", Severity::structural, "arity must be positive", {}, {}});
        return rep;
    }
    for (std::size_t i = 0; i + 1 < s.elements.size(); ++i) {
        if (s.elements[i] >= s.elements[i + 1]) {
            rep.add({"elements-order", Severity::structural,
                     "element ids must be strictly increasing",
                     {s.elements[i], s.elements[i + 1]},
                     {}});
            return rep;
        }
    }
    std::size_t expected = s.elements.empty() ? 0 : 1;
    for (std::uint32_t i = 0; i < s.arity && !s.elements.empty(); ++i) expected *= s.elements.size();
    if (s.table.size() != expected) {
        rep.add({"non-total-table", Severity::structural,
                 "tuple table has " + std::to_string(s.table.size()) + " entries, expected " +
                     std::to_string(expected),
                 {},
                 {}});
        return rep;
    }
    for (std::size_t r = 0; r < s.table.size(); ++r) {
        const TupleEntry& e = s.table[r];
        if (e.fn_values.size() != static_cast<std::size_t>(e.rel_index) + 1) {
            rep.add({"fn-arity", Severity::structural,
                     "tuple rank " + std::to_string(r) + " stores " +
                         std::to_string(e.fn_values.size()) + " function values for relation index " +
                         std::to_string(e.rel_index),
                     {},
                     {}});
            continue;
        }
        for (ElementId v : e.fn_values) {
            if (!s.contains(v)) {
                rep.add({"dangling-id", Severity::structural,
                         "tuple rank " + std::to_string(r) + " has function value " +
                             std::to_string(v) + " outside the element set",
                         {v},
                         {}});
                break;
            }
        }
    }
    if (s.labeled()) {
        if (s.label_universe > 64) {
            rep.add({"label-universe", Severity::structural, "label universe exceeds 64", {}, {}});
            return rep;
        }
        if (s.labels.size() != s.elements.size()) {
            rep.add({"labels-shape", Severity::structural,
                     "labels list must match the element list", {}, {}});
            return rep;
        }
        LabelSet allowed = (s.label_universe == 64) ? ~LabelSet{0}
                                                    : ((LabelSet{1} << s.label_universe) - 1);
        for (std::size_t i = 0; i < s.labels.size(); ++i) {
            if (s.labels[i] & ~allowed) {
                rep.add({"label-range", Severity::structural,
                         "element " + std::to_string(s.elements[i]) +
                             " carries a label index outside the configured universe",
                         {s.elements[i]},
                         {}});
            }
        }
    } else if (!s.labels.empty()) {
        rep.add({"labels-shape", Severity::structural,
                 "labels present but label universe is 0", {}, {}});
    }
    return rep;
}

/// Least superset of the seeds closed under the stored function values: for any
/// tuple over the set, all s_i with i <= rel_index land back in the set.
/// Returns sorted element ids. Worklist-incremental; each completed tuple is
/// scanned once.
inline std::vector<ElementId> generated_substructure(const Structure& s,
                                                     std::span<const ElementId> seeds) {
    const std::size_t n = s.elements.size();
    std::vector<char> in(n, 0);
    std::vector<std::uint32_t> members;
    for (ElementId id : seeds) {
        auto idx = s.index_of(id);
        if (!idx) throw input_error("dangling-id", "seed " + std::to_string(id) + " is not an element");
        if (!in[*idx]) {
            in[*idx] = 1;
            members.push_back(*idx);
        }
    }
    if (s.arity == 0 || n == 0) return {};

    // Tuples are visited when they first become fully contained in the set. We
    // enumerate, for each batch of newly added indexes, all tuples over the
    // current set that use at least one new index.
    std::vector<std::uint32_t> newly(members.begin(), members.end());
    std::vector<std::uint32_t> current(members.begin(), members.end());
    std::sort(current.begin(), current.end());
    while (!newly.empty()) {
        if (current.size() == n) break;  // saturated: the closure cannot grow further
        std::vector<std::uint32_t> added;
        // enumerate tuples over `current` containing >= 1 element of `newly`
        std::vector<char> is_new(n, 0);
        for (auto i : newly) is_new[i] = 1;
        std::vector<std::uint32_t> pos(s.arity, 0);
        if (current.empty()) break;
        for (;;) {
            bool touches_new = false;
            for (auto p : pos)
                if (is_new[current[p]]) { touches_new = true; break; }
            if (touches_new) {
                std::vector<std::uint32_t> t(s.arity);
                for (std::uint32_t p = 0; p < s.arity; ++p) t[p] = current[pos[p]];
                const TupleEntry& e = s.entry(t);
                for (ElementId v : e.fn_values) {
                    auto vi = s.index_of(v);
                    if (vi && !in[*vi]) {
                        in[*vi] = 1;
                        added.push_back(*vi);
                    }
                }
            }
            if (!next_tuple(pos, current.size())) break;
        }
        for (auto i : added) current.push_back(i);
        std::sort(current.begin(), current.end());
        newly = std::move(added);
    }
    std::vector<ElementId> out;
    for (std::size_t i = 0; i < n; ++i)
        if (in[i]) out.push_back(s.elements[i]);
    return out;
}

/// True iff no member of the candidate set is generated by the others.
inline bool independence_check(const Structure& s, std::span<const ElementId> candidate) {
    for (std::size_t drop = 0; drop < candidate.size(); ++drop) {
        std::vector<ElementId> rest;
        rest.reserve(candidate.size() - 1);
        for (std::size_t i = 0; i < candidate.size(); ++i)
            if (i != drop) rest.push_back(candidate[i]);
        auto closure = generated_substructure(s, rest);
        if (std::binary_search(closure.begin(), closure.end(), candidate[drop])) return false;
    }
    return true;
}

namespace detail {

/// Search for a substructure-independent set of size n+1. Candidates are
/// restricted to elements whose singleton closures omit each other; this prunes
/// amalgam outputs where most closures are the whole structure.
inline std::optional<std::vector<ElementId>> find_independent_set(const Structure& s,
                                                                  std::uint32_t set_size) {
    if (s.elements.size() < set_size) return std::nullopt;
    const std::size_t n = s.elements.size();
    std::vector<std::vector<ElementId>> closure(n);
    for (std::size_t i = 0; i < n; ++i)
        closure[i] = generated_substructure(s, std::span<const ElementId>(&s.elements[i], 1));

    // pairwise admissibility: x may sit beside y only if neither generates the other
    auto admissible = [&](std::size_t i, std::size_t j) {
        return !std::binary_search(closure[i].begin(), closure[i].end(), s.elements[j]) &&
               !std::binary_search(closure[j].begin(), closure[j].end(), s.elements[i]);
    };

    std::vector<std::size_t> pick;
    std::vector<ElementId> ids;
    auto rec = [&](auto&& self, std::size_t start) -> bool {
        if (pick.size() == set_size) {
            ids.assign(pick.size(), 0);
            for (std::size_t q = 0; q < pick.size(); ++q) ids[q] = s.elements[pick[q]];
            return independence_check(s, ids);
        }
        for (std::size_t i = start; i < n; ++i) {
            bool ok = true;
            for (auto p : pick)
                if (!admissible(p, i)) { ok = false; break; }
            if (!ok) continue;
            pick.push_back(i);
            if (self(self, i + 1)) return true;
            pick.pop_back();
        }
        return false;
    };
    if (rec(rec, 0)) return ids;
    return std::nullopt;
}

}  // namespace detail

/// BKL axioms for a finite structure. B1/B2 are representational and re-checked
/// structurally; B3 is searched with a concrete witness; B4 is automatic for
/// finite structures and noted as satisfied.
inline ValidationReport validate_bkl(const Structure& s) {
    ValidationReport rep = validate_structural(s);
    if (!rep.ok()) return rep;
    if (s.family != Family::bkl) {
        rep.add({"family", Severity::structural, "structure is not tagged as bkl", {}, {}});
        return rep;
    }
    auto witness = detail::find_independent_set(s, s.arity + 1);
    if (witness) {
        rep.add({"B3", Severity::axiom,
                 "substructure-independent set of size " + std::to_string(s.arity + 1),
                 *witness,
                 {}});
    }
    rep.notes.push_back("B1/B2 hold representationally; B4 automatic for finite structures");
    return rep;
}

/// Label axiom A1: distinct elements carry distinct label sets.
inline ValidationReport validate_labels(const Structure& s) {
    ValidationReport rep = validate_structural(s);
    if (!rep.ok()) return rep;
    if (!s.labeled()) {
        rep.add({"unlabeled", Severity::structural, "structure has no label universe", {}, {}});
        return rep;
    }
    std::map<LabelSet, ElementId> seen;
    for (std::size_t i = 0; i < s.elements.size(); ++i) {
        auto [it, fresh] = seen.emplace(s.labels[i], s.elements[i]);
        if (!fresh) {
            rep.add({"A1", Severity::axiom, "two elements share a label set",
                     {it->second, s.elements[i]},
                     {}});
            return rep;
        }
    }
    return rep;
}

/// Induced structure on a generated-closed subset of the elements (ids kept).
inline Structure restrict_to(const Structure& s, std::span<const ElementId> subset_sorted) {
    Structure out;
    out.family = s.family;
    out.arity = s.arity;
    out.label_universe = s.label_universe;
    out.elements.assign(subset_sorted.begin(), subset_sorted.end());
    std::vector<std::uint32_t> parent_idx(out.elements.size());
    for (std::size_t i = 0; i < out.elements.size(); ++i) {
        auto idx = s.index_of(out.elements[i]);
        if (!idx) throw input_error("dangling-id", "restriction element is not in the structure");
        parent_idx[i] = *idx;
        if (s.labeled()) out.labels.push_back(s.labels[*idx]);
    }
    if (out.elements.empty()) return out;
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < s.arity; ++i) count *= out.elements.size();
    out.table.resize(count);
    std::vector<std::uint32_t> pos(s.arity, 0);
    std::size_t rank = 0;
    for (;;) {
        std::vector<std::uint32_t> t(s.arity);
        for (std::uint32_t p = 0; p < s.arity; ++p) t[p] = parent_idx[pos[p]];
        const TupleEntry& e = s.entry(t);
        for (ElementId v : e.fn_values) {
            if (!std::binary_search(out.elements.begin(), out.elements.end(), v))
                throw input_error("not-closed",
                                  "subset is not closed under the function values");
        }
        out.table[rank] = e;
        ++rank;
        if (!next_tuple(pos, out.elements.size())) break;
    }
    return out;
}

/// Renumber elements to 0..m-1 (order preserving), dropping labels. Used as the
/// canonical form for isomorphism-type identity of small structures.
inline Structure canonical_type(const Structure& s) {
    Structure out;
    out.family = s.family;
    out.arity = s.arity;
    out.label_universe = 0;
    out.elements.resize(s.elements.size());
    for (std::size_t i = 0; i < out.elements.size(); ++i)
        out.elements[i] = static_cast<ElementId>(i);
    out.table = s.table;
    for (auto& e : out.table)
        for (auto& v : e.fn_values) v = static_cast<ElementId>(*s.index_of(v));
    return out;
}

}  // namespace cubeamalg
