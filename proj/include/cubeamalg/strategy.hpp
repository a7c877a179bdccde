#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <cubeamalg/core.hpp>
#include <cubeamalg/structure.hpp>
#include <cubeamalg/validation.hpp>

namespace cubeamalg {

namespace detail {

/// Subsets of {0,...,L-1} in the fixed total order (size, then lexicographic on
/// the sorted index list), yielded one at a time through a visitor that returns
/// true to stop.
template <typename Visit>
inline void for_each_label_set(std::uint32_t universe, Visit&& visit) {
    for (std::uint32_t size = 0; size <= universe; ++size) {
        std::vector<std::uint32_t> comb(size);
        for (std::uint32_t i = 0; i < size; ++i) comb[i] = i;
        for (;;) {
            LabelSet mask = 0;
            for (auto i : comb) mask |= LabelSet{1} << i;
            if (visit(mask)) return;
            // next combination in lexicographic order
            std::int64_t p = static_cast<std::int64_t>(size) - 1;
            while (p >= 0 && comb[p] == universe - size + p) --p;
            if (p < 0) break;
            ++comb[p];
            for (std::uint32_t q = static_cast<std::uint32_t>(p) + 1; q < size; ++q)
                comb[q] = comb[q - 1] + 1;
        }
        if (size == universe) break;
    }
}

}  // namespace detail

/// Least label set not in `used`, in the fixed (size, lexicographic) order.
/// Optionally constrained to contain `require` and avoid `forbid`.
inline LabelSet least_unused_label_set(std::uint32_t universe, const std::set<LabelSet>& used,
                                       LabelSet require = 0, LabelSet forbid = 0) {
    std::optional<LabelSet> found;
    detail::for_each_label_set(universe, [&](LabelSet candidate) {
        if ((candidate & require) != require) return false;
        if (candidate & forbid) return false;
        if (used.count(candidate)) return false;
        found = candidate;
        return true;
    });
    if (!found)
        throw refusal_error("label universe exhausted; a larger label universe L is required");
    return *found;
}

/// A pluggable structure family: which finite structures are members, how far
/// disjoint amalgamation reaches, and which canonical one-point extensions the
/// runner schedules.
struct AmalgamationStrategy {
    Family family = Family::bkl;
    std::uint32_t n = 2;               // arity for bkl; fixed 1 for sets, 2 for graphs
    std::uint32_t label_universe = 0;  // 0 = unlabeled

    std::uint32_t arity() const {
        switch (family) {
            case Family::bkl: return n;
            case Family::sets: return 1;
            case Family::graphs: return 2;
        }
        return 1;
    }

    /// Largest k with disjoint k-amalgamation, or nullopt for "all k".
    std::optional<std::uint32_t> max_amalgamation_k() const {
        if (family == Family::bkl) return n;
        return std::nullopt;
    }

    Structure empty_structure() const {
        Structure s;
        s.family = family;
        s.arity = arity();
        s.label_universe = label_universe;
        return s;
    }

    ValidationReport validate_member(const Structure& s) const;

    /// Canonical one-point extension types of a member, in deterministic order.
    /// The new element's id is one past the base's largest id.
    std::vector<Structure> one_point_extension_types(const Structure& base) const;
};

inline ValidationReport AmalgamationStrategy::validate_member(const Structure& s) const {
    ValidationReport rep;
    if (s.family != family) {
        rep.add({"family", Severity::structural,
                 "structure family " + family_name(s.family) + " does not match the strategy", {}, {}});
        return rep;
    }
    if (s.arity != arity()) {
        rep.add({"arity", Severity::structural, "structure arity does not match the family", {}, {}});
        return rep;
    }
    if (s.label_universe != label_universe) {
        rep.add({"label-universe", Severity::structural,
                 "structure label universe does not match the strategy", {}, {}});
        return rep;
    }
    switch (family) {
        case Family::bkl:
            rep.merge(validate_bkl(s));
            break;
        case Family::sets: {
            rep.merge(validate_structural(s));
            if (!rep.ok()) return rep;
            for (std::size_t r = 0; r < s.table.size(); ++r) {
                const auto t = s.tuple_at_rank(r);
                const TupleEntry& e = s.table[r];
                if (e.rel_index != 0 || e.fn_values != std::vector<ElementId>{s.elements[t[0]]}) {
                    rep.add({"sets-trivial", Severity::axiom,
                             "set members carry the trivial tuple table", {s.elements[t[0]]}, {}});
                    return rep;
                }
            }
            break;
        }
        case Family::graphs: {
            rep.merge(validate_structural(s));
            if (!rep.ok()) return rep;
            for (std::size_t r = 0; r < s.table.size(); ++r) {
                const auto t = s.tuple_at_rank(r);
                const TupleEntry& e = s.table[r];
                if (e.rel_index > 1) {
                    rep.add({"graph-relation", Severity::axiom,
                             "graph tuples take relation index 0 (non-edge) or 1 (edge)", {}, {}});
                    return rep;
                }
                for (ElementId v : e.fn_values) {
                    if (v != s.elements[t[0]]) {
                        rep.add({"graph-functions", Severity::axiom,
                                 "graph function values are the first coordinate", {v}, {}});
                        return rep;
                    }
                }
                if (t[0] == t[1] && e.rel_index != 0) {
                    rep.add({"irreflexive", Severity::axiom, "self-loop stored as an edge",
                             {s.elements[t[0]]},
                             {}});
                    return rep;
                }
                std::vector<std::uint32_t> rev{t[1], t[0]};
                if (s.entry(rev).rel_index != e.rel_index) {
                    rep.add({"symmetric", Severity::axiom, "edge relation is not symmetric",
                             {s.elements[t[0]], s.elements[t[1]]},
                             {}});
                    return rep;
                }
            }
            break;
        }
    }
    if (rep.ok() && label_universe > 0) rep.merge(validate_labels(s));
    return rep;
}

namespace detail {

/// Append a fresh element to `base` and fill every new tuple with entries chosen
/// by `fill(tuple_of_ids) -> TupleEntry`.
inline Structure one_point_extend(const Structure& base, ElementId fresh,
                                  const std::function<TupleEntry(const std::vector<ElementId>&)>& fill) {
    Structure out;
    out.family = base.family;
    out.arity = base.arity;
    out.label_universe = 0;  // extension types are family-level; labels ride on amalgamation
    out.elements = base.elements;
    out.elements.push_back(fresh);
    std::sort(out.elements.begin(), out.elements.end());
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < out.arity; ++i) count *= out.elements.size();
    out.table.resize(count);
    std::vector<std::uint32_t> pos(out.arity, 0);
    std::size_t rank = 0;
    for (;;) {
        std::vector<ElementId> ids(out.arity);
        bool uses_fresh = false;
        for (std::uint32_t p = 0; p < out.arity; ++p) {
            ids[p] = out.elements[pos[p]];
            if (ids[p] == fresh) uses_fresh = true;
        }
        if (!uses_fresh) {
            std::vector<std::uint32_t> base_idx(out.arity);
            for (std::uint32_t p = 0; p < out.arity; ++p) base_idx[p] = *base.index_of(ids[p]);
            out.table[rank] = base.entry(base_idx);
        } else {
            out.table[rank] = fill(ids);
        }
        ++rank;
        if (!next_tuple(pos, out.elements.size())) break;
    }
    return out;
}

}  // namespace detail

inline std::vector<Structure> AmalgamationStrategy::one_point_extension_types(
    const Structure& base) const {
    ElementId fresh = base.elements.empty() ? 0 : base.elements.back() + 1;
    std::vector<Structure> out;
    Structure unlabeled = base;
    unlabeled.label_universe = 0;
    unlabeled.labels.clear();
    switch (family) {
        case Family::bkl: {
            // The generic type: every new tuple takes the largest relation index
            // and function values enumerating the whole extension, the pattern
            // the completion recipe uses for fresh tuples.
            std::vector<ElementId> enumeration = unlabeled.elements;
            enumeration.push_back(fresh);
            std::sort(enumeration.begin(), enumeration.end());
            auto generic = detail::one_point_extend(
                unlabeled, fresh, [&](const std::vector<ElementId>&) {
                    TupleEntry e;
                    e.rel_index = static_cast<std::uint32_t>(enumeration.size() - 1);
                    e.fn_values = enumeration;
                    return e;
                });
            out.push_back(std::move(generic));
            break;
        }
        case Family::sets: {
            out.push_back(detail::one_point_extend(unlabeled, fresh,
                                                   [&](const std::vector<ElementId>& ids) {
                                                       TupleEntry e;
                                                       e.rel_index = 0;
                                                       e.fn_values = {ids[0]};
                                                       return e;
                                                   }));
            break;
        }
        case Family::graphs: {
            // One type per neighbor set, in (size, lexicographic) order.
            std::vector<std::vector<ElementId>> neighbor_sets;
            std::vector<ElementId> elems = unlabeled.elements;
            for (std::size_t size = 0; size <= elems.size(); ++size) {
                std::vector<std::size_t> comb(size);
                for (std::size_t i = 0; i < size; ++i) comb[i] = i;
                for (;;) {
                    std::vector<ElementId> ns;
                    for (auto i : comb) ns.push_back(elems[i]);
                    neighbor_sets.push_back(ns);
                    std::int64_t p = static_cast<std::int64_t>(size) - 1;
                    while (p >= 0 && comb[p] == elems.size() - size + p) --p;
                    if (p < 0) break;
                    ++comb[p];
                    for (std::size_t q = static_cast<std::size_t>(p) + 1; q < size; ++q)
                        comb[q] = comb[q - 1] + 1;
                }
                if (size == elems.size()) break;
            }
            for (const auto& ns : neighbor_sets) {
                out.push_back(detail::one_point_extend(
                    unlabeled, fresh, [&](const std::vector<ElementId>& ids) {
                        TupleEntry e;
                        e.rel_index = 0;
                        bool edge = false;
                        if (ids[0] == fresh && ids[1] != fresh)
                            edge = std::binary_search(ns.begin(), ns.end(), ids[1]);
                        else if (ids[1] == fresh && ids[0] != fresh)
                            edge = std::binary_search(ns.begin(), ns.end(), ids[0]);
                        e.rel_index = edge ? 1 : 0;
                        e.fn_values.assign(e.rel_index + 1, ids[0]);
                        return e;
                    }));
            }
            break;
        }
    }
    // Keep only valid members; types are deduplicated by construction.
    AmalgamationStrategy unlabeled_strategy{family, n, 0};
    std::vector<Structure> valid;
    for (auto& s : out)
        if (unlabeled_strategy.validate_member(s).ok()) valid.push_back(std::move(s));
    return valid;
}

}  // namespace cubeamalg
