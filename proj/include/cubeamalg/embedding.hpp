#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <cubeamalg/core.hpp>
#include <cubeamalg/structure.hpp>

namespace cubeamalg {

/// A finite partial map on element ids, stored as pairs sorted by source id.
/// Embeddings and cube maps are ElementMaps whose validity is certified by
/// is_embedding against concrete source/target structures.
struct ElementMap {
    std::vector<std::pair<ElementId, ElementId>> pairs;

    static ElementMap identity(std::span<const ElementId> ids) {
        ElementMap m;
        m.pairs.reserve(ids.size());
        for (ElementId id : ids) m.pairs.emplace_back(id, id);
        return m;
    }

    std::optional<ElementId> apply(ElementId src) const {
        auto it = std::lower_bound(pairs.begin(), pairs.end(), src,
                                   [](const auto& p, ElementId v) { return p.first < v; });
        if (it == pairs.end() || it->first != src) return std::nullopt;
        return it->second;
    }

    ElementId at(ElementId src) const {
        auto v = apply(src);
        if (!v) throw input_error("map-domain", "element " + std::to_string(src) + " not in map domain");
        return *v;
    }

    void set(ElementId src, ElementId dst) {
        auto it = std::lower_bound(pairs.begin(), pairs.end(), src,
                                   [](const auto& p, ElementId v) { return p.first < v; });
        if (it != pairs.end() && it->first == src)
            it->second = dst;
        else
            pairs.insert(it, {src, dst});
    }

    bool injective() const {
        std::vector<ElementId> targets;
        targets.reserve(pairs.size());
        for (const auto& [s, t] : pairs) targets.push_back(t);
        std::sort(targets.begin(), targets.end());
        return std::adjacent_find(targets.begin(), targets.end()) == targets.end();
    }

    std::vector<ElementId> image() const {
        std::vector<ElementId> out;
        out.reserve(pairs.size());
        for (const auto& [s, t] : pairs) out.push_back(t);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<ElementId> image_of(std::span<const ElementId> subset) const {
        std::vector<ElementId> out;
        out.reserve(subset.size());
        for (ElementId s : subset) out.push_back(at(s));
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const ElementMap&, const ElementMap&) = default;
};

/// g after f: (g ∘ f)(x) = g(f(x)), defined on f's domain.
inline ElementMap compose(const ElementMap& g, const ElementMap& f) {
    ElementMap out;
    out.pairs.reserve(f.pairs.size());
    for (const auto& [s, mid] : f.pairs) out.pairs.emplace_back(s, g.at(mid));
    return out;
}

/// Whether the map is an embedding a -> b: total on a, injective, preserving
/// relation indices, function values, and (when both sides are labeled) label sets.
inline bool is_embedding(const Structure& a, const Structure& b, const ElementMap& m,
                         std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (a.arity != b.arity) return fail("arity mismatch");
    if (m.pairs.size() != a.elements.size()) return fail("map not total on the source");
    std::vector<std::uint32_t> target_idx(a.elements.size());
    for (std::size_t i = 0; i < a.elements.size(); ++i) {
        auto v = m.apply(a.elements[i]);
        if (!v) return fail("map not total on the source");
        auto ti = b.index_of(*v);
        if (!ti) return fail("map target outside the codomain");
        target_idx[i] = *ti;
    }
    if (!m.injective()) return fail("map not injective");
    if (a.labeled() && b.labeled()) {
        if (a.label_universe != b.label_universe) return fail("label universe mismatch");
        for (std::size_t i = 0; i < a.elements.size(); ++i)
            if (a.labels[i] != b.labels[target_idx[i]]) return fail("label set not preserved");
    } else if (a.labeled() != b.labeled()) {
        return fail("labeledness mismatch");
    }
    if (a.elements.empty()) return true;
    std::vector<std::uint32_t> pos(a.arity, 0);
    std::vector<std::uint32_t> src_t(a.arity), dst_t(a.arity);
    for (;;) {
        for (std::uint32_t p = 0; p < a.arity; ++p) {
            src_t[p] = pos[p];
            dst_t[p] = target_idx[pos[p]];
        }
        const TupleEntry& ea = a.entry(src_t);
        const TupleEntry& eb = b.entry(dst_t);
        if (ea.rel_index != eb.rel_index) return fail("relation index not preserved");
        for (std::uint32_t i = 0; i <= ea.rel_index; ++i) {
            if (m.at(ea.fn_values[i]) != eb.fn_values[i]) return fail("function value not preserved");
        }
        if (!next_tuple(pos, a.elements.size())) break;
    }
    return true;
}

namespace detail {

struct EmbeddingSearch {
    const Structure& a;
    const Structure& b;
    std::size_t limit;
    std::vector<std::int64_t> assign;   // source index -> target index, -1 unassigned
    std::vector<char> used;             // target index used
    std::vector<ElementMap> found;

    EmbeddingSearch(const Structure& a_, const Structure& b_, std::size_t limit_)
        : a(a_), b(b_), limit(limit_), assign(a_.elements.size(), -1), used(b_.elements.size(), 0) {}

    // check all tuples fully inside the assigned prefix that use position `p`
    bool consistent_with(std::uint32_t p) {
        std::vector<std::uint32_t> assigned;
        for (std::size_t i = 0; i < assign.size(); ++i)
            if (assign[i] >= 0) assigned.push_back(static_cast<std::uint32_t>(i));
        std::vector<std::uint32_t> pos(a.arity, 0);
        std::vector<std::uint32_t> src_t(a.arity), dst_t(a.arity);
        for (;;) {
            bool uses_p = false;
            for (auto q : pos)
                if (assigned[q] == p) { uses_p = true; break; }
            if (uses_p) {
                for (std::uint32_t q = 0; q < a.arity; ++q) {
                    src_t[q] = assigned[pos[q]];
                    dst_t[q] = static_cast<std::uint32_t>(assign[assigned[pos[q]]]);
                }
                const TupleEntry& ea = a.entry(src_t);
                const TupleEntry& eb = b.entry(dst_t);
                if (ea.rel_index != eb.rel_index) return false;
                for (std::uint32_t i = 0; i <= ea.rel_index; ++i) {
                    auto vi = a.index_of(ea.fn_values[i]);
                    std::int64_t va = assign[*vi];
                    auto wi = b.index_of(eb.fn_values[i]);
                    if (va >= 0) {
                        if (static_cast<std::uint32_t>(va) != *wi) return false;
                    } else if (used[*wi]) {
                        // the forced target is already taken by a different source
                        return false;
                    }
                }
            }
            if (!next_tuple(pos, assigned.size())) break;
        }
        return true;
    }

    bool run(std::uint32_t depth) {
        if (depth == a.elements.size()) {
            ElementMap m;
            for (std::size_t i = 0; i < assign.size(); ++i)
                m.pairs.emplace_back(a.elements[i], b.elements[assign[i]]);
            if (is_embedding(a, b, m)) {
                found.push_back(std::move(m));
                if (found.size() >= limit) return true;
            }
            return false;
        }
        if (assign[depth] >= 0) return run(depth + 1);  // pre-seeded
        for (std::uint32_t t = 0; t < b.elements.size(); ++t) {
            if (used[t]) continue;
            if (a.labeled() && b.labeled() && a.labels[depth] != b.labels[t]) continue;
            assign[depth] = t;
            used[t] = 1;
            if (consistent_with(depth) && run(depth + 1)) return true;
            assign[depth] = -1;
            used[t] = 0;
        }
        return false;
    }
};

}  // namespace detail

/// Up to `limit` embeddings a -> b, in lexicographic order of the map on a's
/// sorted elements. The list is complete when fewer than `limit` exist.
/// `partial` pre-seeds assignments (used for extension-axiom checks).
inline std::vector<ElementMap> find_embeddings(const Structure& a, const Structure& b,
                                               std::size_t limit,
                                               const ElementMap* partial = nullptr) {
    if (a.arity != b.arity) throw refusal_error("embedding search requires equal arity");
    if (a.family != b.family) throw refusal_error("embedding search requires the same family");
    if (a.labeled() != b.labeled())
        throw refusal_error("embedding search requires both or neither side labeled");
    if (a.labeled() && a.label_universe != b.label_universe)
        throw refusal_error("embedding search requires the same label universe");
    if (limit == 0) return {};
    if (a.elements.size() > b.elements.size()) return {};
    detail::EmbeddingSearch search(a, b, limit);
    if (partial) {
        for (const auto& [src, dst] : partial->pairs) {
            auto si = a.index_of(src);
            auto ti = b.index_of(dst);
            if (!si || !ti) throw input_error("map-domain", "partial assignment off the structures");
            search.assign[*si] = *ti;
            if (search.used[*ti]) return {};
            search.used[*ti] = 1;
        }
    }
    search.run(0);
    return std::move(search.found);
}

inline bool embedding_exists(const Structure& a, const Structure& b) {
    return !find_embeddings(a, b, 1).empty();
}

/// Transport a structure along a bijective renaming of its element ids. The new
/// element list is sorted, the table re-indexed, and labels carried along.
inline Structure rename_structure(const Structure& s, const ElementMap& renaming) {
    if (!renaming.injective()) throw input_error("renaming", "renaming must be injective");
    Structure out;
    out.family = s.family;
    out.arity = s.arity;
    out.label_universe = s.label_universe;
    std::vector<std::pair<ElementId, std::uint32_t>> renamed;  // new id -> old index
    renamed.reserve(s.elements.size());
    for (std::size_t i = 0; i < s.elements.size(); ++i)
        renamed.emplace_back(renaming.at(s.elements[i]), static_cast<std::uint32_t>(i));
    std::sort(renamed.begin(), renamed.end());
    std::vector<std::uint32_t> new_index_of_old(s.elements.size());
    for (std::size_t i = 0; i < renamed.size(); ++i) {
        out.elements.push_back(renamed[i].first);
        new_index_of_old[renamed[i].second] = static_cast<std::uint32_t>(i);
        if (s.labeled()) out.labels.push_back(0);
    }
    for (std::size_t i = 0; i < renamed.size(); ++i)
        if (s.labeled()) out.labels[i] = s.labels[renamed[i].second];
    out.table.resize(s.table.size());
    if (!s.elements.empty()) {
        std::vector<std::uint32_t> pos(s.arity, 0);
        for (;;) {
            const TupleEntry& e = s.entry(pos);
            std::vector<std::uint32_t> new_pos(s.arity);
            for (std::uint32_t p = 0; p < s.arity; ++p) new_pos[p] = new_index_of_old[pos[p]];
            TupleEntry ne;
            ne.rel_index = e.rel_index;
            ne.fn_values.reserve(e.fn_values.size());
            for (ElementId v : e.fn_values) ne.fn_values.push_back(renaming.at(v));
            out.table[out.rank_of(new_pos)] = std::move(ne);
            if (!next_tuple(pos, s.elements.size())) break;
        }
    }
    return out;
}

/// A bijective embedding if one exists (first in lexicographic order). For these
/// structures a bijective embedding reflects all atomic facts, so it is an
/// isomorphism.
inline std::optional<ElementMap> is_isomorphic(const Structure& a, const Structure& b) {
    if (a.arity != b.arity) throw refusal_error("isomorphism check requires equal arity");
    if (a.elements.size() != b.elements.size()) return std::nullopt;
    auto found = find_embeddings(a, b, 1);
    if (found.empty()) return std::nullopt;
    return found.front();
}

}  // namespace cubeamalg
