#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <cubeamalg/amalgamation.hpp>
#include <cubeamalg/core.hpp>
#include <cubeamalg/embedding.hpp>
#include <cubeamalg/strategy.hpp>
#include <cubeamalg/structure.hpp>

namespace cubeamalg {

/// Finite digraph on isomorphism-class representatives of a family, with an arc
/// u -> v exactly when an embedding from u's structure into v's exists.
/// Reflexive (identity embeddings) and transitive (composition).
struct EmbeddabilityDigraph {
    std::vector<Structure> vertices;       // first-occurrence representatives
    std::vector<std::vector<bool>> arcs;   // arcs[u][v]

    bool arc(std::size_t u, std::size_t v) const { return arcs[u][v]; }
    std::size_t size() const { return vertices.size(); }
};

inline std::uint32_t configured_thread_count() {
    if (const char* env = std::getenv("CUBE_AMALGAM_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1 && v <= 256) return static_cast<std::uint32_t>(v);
    }
    return 1;
}

inline EmbeddabilityDigraph build_digraph(const std::vector<Structure>& family) {
    EmbeddabilityDigraph d;
    if (family.empty()) return d;
    const Structure& first = family.front();
    for (const auto& s : family) {
        if (s.family != first.family || s.arity != first.arity ||
            s.label_universe != first.label_universe)
            throw refusal_error("digraph construction needs a uniform family");
    }
    for (const auto& s : family) {
        bool seen = false;
        for (const auto& rep : d.vertices)
            if (is_isomorphic(rep, s)) { seen = true; break; }
        if (!seen) d.vertices.push_back(s);
    }
    const std::size_t m = d.vertices.size();
    d.arcs.assign(m, std::vector<bool>(m, false));
    const std::uint32_t threads = configured_thread_count();
    auto compute_rows = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t u = begin; u < m; u += stride)
            for (std::size_t v = 0; v < m; ++v)
                d.arcs[u][v] = embedding_exists(d.vertices[u], d.vertices[v]);
    };
    if (threads <= 1 || m < 2) {
        compute_rows(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::uint32_t t = 0; t < threads; ++t) pool.emplace_back(compute_rows, t, threads);
        for (auto& t : pool) t.join();
    }
    for (std::size_t u = 0; u < m; ++u) {
        if (!d.arcs[u][u]) throw internal_error("embeddability digraph is not reflexive");
        for (std::size_t v = 0; v < m; ++v)
            for (std::size_t w = 0; w < m; ++w)
                if (d.arcs[u][v] && d.arcs[v][w] && !d.arcs[u][w])
                    throw internal_error("embeddability digraph is not transitive");
    }
    return d;
}

/// An induced embedding of the combinatorial k-cube into the digraph: injective
/// on faces, with an arc between distinct images exactly for inclusions.
struct CubeWitness {
    std::uint32_t k = 0;
    std::map<Face, std::size_t> assignment;  // face -> vertex index
};

inline std::optional<CubeWitness> find_cube_embedding(const EmbeddabilityDigraph& d,
                                                      std::uint32_t k) {
    if (k > max_cube_dimension) throw refusal_error("cube dimension exceeds the bound");
    const std::size_t need = std::size_t{1} << k;
    if (d.size() < need) return std::nullopt;
    auto faces = all_faces(k);
    std::vector<std::size_t> pick(faces.size(), 0);
    std::vector<char> used(d.size(), 0);
    auto consistent = [&](std::size_t depth) {
        Face f = faces[depth];
        std::size_t vf = pick[depth];
        for (std::size_t q = 0; q < depth; ++q) {
            Face g = faces[q];
            std::size_t vg = pick[q];
            bool want_fg = face_subset(f, g);
            bool want_gf = face_subset(g, f);
            if (d.arc(vf, vg) != want_fg) return false;
            if (d.arc(vg, vf) != want_gf) return false;
        }
        return true;
    };
    auto rec = [&](auto&& self, std::size_t depth) -> bool {
        if (depth == faces.size()) return true;
        for (std::size_t v = 0; v < d.size(); ++v) {
            if (used[v]) continue;
            pick[depth] = v;
            if (consistent(depth)) {
                used[v] = 1;
                if (self(self, depth + 1)) return true;
                used[v] = 0;
            }
        }
        return false;
    };
    if (!rec(rec, 0)) return std::nullopt;
    CubeWitness w;
    w.k = k;
    for (std::size_t i = 0; i < faces.size(); ++i) w.assignment[faces[i]] = pick[i];
    return w;
}

/// Largest k <= k_max whose combinatorial k-cube embeds; a lower bound for the
/// family's dimension. Monotone in k (restrict a witness to the faces below
/// [k-1]), so the scan stops at the first failure.
inline std::uint32_t dimension_estimate(const EmbeddabilityDigraph& d, std::uint32_t k_max) {
    std::uint32_t best = 0;
    bool any = false;
    for (std::uint32_t k = 0; k <= k_max; ++k) {
        if (find_cube_embedding(d, k)) {
            best = k;
            any = true;
        } else {
            break;
        }
    }
    if (!any) return 0;  // empty digraph: no 0-cube either, reported as 0
    return best;
}

/// Ternary encoding of label-pattern pairs: digit i of the index selects
/// whether label i is required (1), forbidden (2), or unconstrained (0).
struct LabelPattern {
    LabelSet required = 0;
    LabelSet forbidden = 0;
};

inline LabelPattern decode_label_pattern(std::uint64_t index, std::uint32_t label_universe) {
    LabelPattern p;
    std::uint32_t digit = 0;
    while (index > 0) {
        if (digit >= label_universe)
            throw refusal_error("label pattern mentions indices beyond the label universe; "
                                "a larger L is required");
        switch (index % 3) {
            case 1: p.required |= LabelSet{1} << digit; break;
            case 2: p.forbidden |= LabelSet{1} << digit; break;
            default: break;
        }
        index /= 3;
        ++digit;
    }
    return p;
}

namespace detail {

/// Canonical family types of each size up to the cap, generated by chains of
/// canonical one-point extensions from the empty structure.
inline std::vector<Structure> chain_types_up_to(const AmalgamationStrategy& strategy,
                                                std::size_t size_cap) {
    AmalgamationStrategy unlabeled{strategy.family, strategy.n, 0};
    std::vector<Structure> out;
    std::vector<Structure> frontier{unlabeled.empty_structure()};
    out.push_back(frontier.front());
    for (std::size_t size = 1; size <= size_cap; ++size) {
        std::vector<Structure> next;
        for (const auto& base : frontier) {
            for (const auto& ext : unlabeled.one_point_extension_types(base)) {
                bool seen = false;
                for (const auto& t : next)
                    if (is_isomorphic(t, ext)) { seen = true; break; }
                if (!seen) next.push_back(canonical_type(ext));
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

}  // namespace detail

/// A single labeled structure realizing, for every canonical family type of
/// size <= size_cap and every tuple of label patterns drawn from the first
/// pattern_cap patterns, an embedded copy whose elements match the patterns.
/// Built by chained disjoint 2-amalgamation over the empty base.
inline Structure generic_labeled_sample(const AmalgamationStrategy& strategy,
                                        std::size_t size_cap, std::uint64_t pattern_cap) {
    if (strategy.label_universe == 0)
        throw refusal_error("the generic sample lives in the labeled class; configure L > 0");
    if (strategy.family == Family::bkl && strategy.n < 2)
        throw refusal_error("the sample construction joins copies by disjoint 2-amalgamation, "
                            "which bkl(1) does not admit; use n >= 2");
    std::vector<LabelPattern> patterns;
    for (std::uint64_t p = 0; p < pattern_cap; ++p)
        patterns.push_back(decode_label_pattern(p, strategy.label_universe));
    if (patterns.empty()) patterns.push_back({});

    Structure current = strategy.empty_structure();
    std::set<LabelSet> used_labels;
    IdAllocator alloc;

    auto realized = [&](const Structure& type, const std::vector<LabelPattern>& tuple) {
        Structure reduct = type;  // canonical types are unlabeled already
        Structure target = current;
        target.label_universe = 0;
        target.labels.clear();
        auto embeddings = find_embeddings(reduct, target, 100000);
        for (const auto& m : embeddings) {
            bool ok = true;
            for (std::size_t i = 0; i < type.elements.size() && ok; ++i) {
                ElementId img = m.at(type.elements[i]);
                LabelSet l = current.labels[*current.index_of(img)];
                if ((l & tuple[i].required) != tuple[i].required) ok = false;
                if (l & tuple[i].forbidden) ok = false;
            }
            if (ok) return true;
        }
        return false;
    };

    auto add_copy = [&](const Structure& type, const std::vector<LabelPattern>& tuple) {
        // fresh copy of the type, labeled to match the patterns
        ElementMap renaming;
        ElementId base_id = current.elements.empty() ? 0 : current.elements.back() + 1;
        for (std::size_t i = 0; i < type.elements.size(); ++i)
            renaming.set(type.elements[i], base_id + static_cast<ElementId>(i));
        Structure copy = rename_structure(type, renaming);
        copy.label_universe = strategy.label_universe;
        copy.labels.assign(copy.elements.size(), 0);
        for (std::size_t i = 0; i < copy.elements.size(); ++i) {
            LabelSet l = least_unused_label_set(strategy.label_universe, used_labels,
                                                tuple[i].required, tuple[i].forbidden);
            copy.labels[i] = l;
            used_labels.insert(l);
        }
        if (current.elements.empty()) {
            current = std::move(copy);
            return;
        }
        CubeDiagram two;
        two.k = 2;
        two.shape = CubeShape::boundary;
        Structure empty = strategy.empty_structure();
        two.faces[0b00] = empty;
        two.faces[0b01] = current;
        two.faces[0b10] = copy;
        two.maps[{0b00, 0b00}] = ElementMap{};
        two.maps[{0b01, 0b01}] = ElementMap::identity(current.elements);
        two.maps[{0b10, 0b10}] = ElementMap::identity(copy.elements);
        two.maps[{0b00, 0b01}] = ElementMap{};
        two.maps[{0b00, 0b10}] = ElementMap{};
        CubeDiagram amalgam = disjoint_amalgamate(strategy, two, alloc);
        current = amalgam.at(0b11);
    };

    auto types = detail::chain_types_up_to(strategy, size_cap);
    for (const auto& type : types) {
        if (type.elements.empty()) continue;
        // all pattern tuples over the type's elements, in lexicographic order
        std::vector<std::size_t> odo(type.elements.size(), 0);
        for (;;) {
            std::vector<LabelPattern> tuple;
            for (auto i : odo) tuple.push_back(patterns[i]);
            if (!realized(type, tuple)) add_copy(type, tuple);
            std::size_t p = odo.size();
            bool advanced = false;
            while (p-- > 0) {
                if (++odo[p] < patterns.size()) { advanced = true; break; }
                odo[p] = 0;
            }
            if (!advanced) break;
        }
    }
    // labels used by the amalgam are transported copies; rebuild the pool for A1 safety
    ValidationReport rep = strategy.validate_member(current);
    if (!rep.ok()) throw internal_error("generic sample failed validation: " + rep.summary());
    return current;
}

}  // namespace cubeamalg
