#pragma once

// Independent oracles: definitional re-implementations kept deliberately apart
// from the library's search code, used to freeze expected values.

#include <vector>

#include <cubeamalg/embedding.hpp>
#include <cubeamalg/structure.hpp>

namespace cubeamalg::testing {

/// Definitional embedding check on a total assignment (source element position
/// -> target element id): injective and preserving relation index, function
/// values, and label sets. Independent of ElementMap and the backtracking search.
inline bool direct_is_embedding(const Structure& a, const Structure& b,
                                const std::vector<ElementId>& assignment) {
    if (assignment.size() != a.elements.size()) return false;
    std::vector<std::uint32_t> target_idx(assignment.size());
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        auto ti = b.index_of(assignment[i]);
        if (!ti) return false;
        target_idx[i] = *ti;
    }
    for (std::size_t i = 0; i < assignment.size(); ++i)
        for (std::size_t j = i + 1; j < assignment.size(); ++j)
            if (assignment[i] == assignment[j]) return false;
    if (a.labeled() != b.labeled()) return false;
    if (a.labeled()) {
        if (a.label_universe != b.label_universe) return false;
        for (std::size_t i = 0; i < assignment.size(); ++i)
            if (a.labels[i] != b.labels[target_idx[i]]) return false;
    }
    if (a.elements.empty()) return true;
    std::vector<std::uint32_t> pos(a.arity, 0);
    for (;;) {
        std::vector<std::uint32_t> src(a.arity), dst(a.arity);
        for (std::uint32_t p = 0; p < a.arity; ++p) {
            src[p] = pos[p];
            dst[p] = target_idx[pos[p]];
        }
        const TupleEntry& ea = a.entry(src);
        const TupleEntry& eb = b.entry(dst);
        if (ea.rel_index != eb.rel_index) return false;
        for (std::uint32_t i = 0; i <= ea.rel_index; ++i) {
            auto vi = a.index_of(ea.fn_values[i]);
            if (assignment[*vi] != eb.fn_values[i]) return false;
        }
        if (!next_tuple(pos, a.elements.size())) break;
    }
    return true;
}

/// Every total assignment source^elements -> target elements, in lexicographic
/// order (the brute-force universe for the theta-characterization oracle).
inline std::vector<std::vector<ElementId>> all_assignments(const Structure& a, const Structure& b) {
    std::vector<std::vector<ElementId>> out;
    if (a.elements.empty()) {
        out.push_back({});
        return out;
    }
    if (b.elements.empty()) return out;
    std::vector<std::size_t> odo(a.elements.size(), 0);
    for (;;) {
        std::vector<ElementId> assignment(a.elements.size());
        for (std::size_t i = 0; i < assignment.size(); ++i) assignment[i] = b.elements[odo[i]];
        out.push_back(std::move(assignment));
        std::size_t p = odo.size();
        bool advanced = false;
        while (p-- > 0) {
            if (++odo[p] < b.elements.size()) { advanced = true; break; }
            odo[p] = 0;
        }
        if (!advanced) break;
    }
    return out;
}

/// All embeddings a -> b found by filtering every assignment through the
/// definitional check, in lexicographic order.
inline std::vector<std::vector<ElementId>> brute_force_embeddings(const Structure& a,
                                                                  const Structure& b) {
    std::vector<std::vector<ElementId>> out;
    for (auto& assignment : all_assignments(a, b))
        if (direct_is_embedding(a, b, assignment)) out.push_back(assignment);
    return out;
}

}  // namespace cubeamalg::testing
