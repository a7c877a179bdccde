#pragma once

// Seeded random structures and disjoint boundary cubes for property tests.
// Generation is constructive where possible and falls back to validator
// rejection, so every emitted value is certified valid.

#include <random>
#include <set>
#include <vector>

#include <cubeamalg/cube.hpp>
#include <cubeamalg/embedding.hpp>
#include <cubeamalg/strategy.hpp>
#include <cubeamalg/structure.hpp>

namespace cubeamalg::testing {

using Rng = std::mt19937_64;

inline TupleEntry random_entry(Rng& rng, const std::vector<ElementId>& domain, ElementId first_coord,
                               double generic_prob) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    TupleEntry e;
    double roll = coin(rng);
    if (roll < generic_prob) {
        e.rel_index = static_cast<std::uint32_t>(domain.size() - 1);
        e.fn_values = domain;
    } else if (roll < generic_prob + 0.25) {
        e.rel_index = 0;
        e.fn_values = {first_coord};
    } else {
        std::uniform_int_distribution<std::uint32_t> rel(0, static_cast<std::uint32_t>(domain.size()) - 1);
        std::uniform_int_distribution<std::size_t> pickv(0, domain.size() - 1);
        e.rel_index = rel(rng);
        for (std::uint32_t i = 0; i <= e.rel_index; ++i) e.fn_values.push_back(domain[pickv(rng)]);
    }
    return e;
}

/// Random valid bkl structure with the given size; retries until the validator
/// accepts (deterministic for a fixed rng state).
inline Structure random_bkl_structure(Rng& rng, std::uint32_t n, std::size_t size,
                                      ElementId first_id = 0) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Structure s;
        s.family = Family::bkl;
        s.arity = n;
        for (std::size_t i = 0; i < size; ++i) s.elements.push_back(first_id + static_cast<ElementId>(i));
        if (size > 0) {
            std::size_t count = 1;
            for (std::uint32_t i = 0; i < n; ++i) count *= size;
            s.table.resize(count);
            std::vector<std::uint32_t> pos(n, 0);
            std::size_t rank = 0;
            double generic_prob = n == 1 ? 0.75 : 0.5;
            for (;;) {
                s.table[rank] = random_entry(rng, s.elements, s.elements[pos[0]], generic_prob);
                ++rank;
                if (!next_tuple(pos, size)) break;
            }
        }
        if (validate_bkl(s).ok()) return s;
    }
    throw std::runtime_error("random bkl generation failed to converge");
}

/// Distinct random label sets over a universe, in place.
inline void attach_random_labels(Rng& rng, Structure& s, std::uint32_t universe) {
    s.label_universe = universe;
    s.labels.assign(s.elements.size(), 0);
    std::set<LabelSet> used;
    std::uniform_int_distribution<LabelSet> pick(0, (LabelSet{1} << universe) - 1);
    for (auto& l : s.labels) {
        do {
            l = pick(rng);
        } while (!used.insert(l).second);
    }
}

/// A disjoint partial k-cube built from private element pools per boundary
/// face, with identity inclusion maps; each tuple's entry is assigned once,
/// with values drawn from its minimal covering face, so subface tables agree.
/// Faces are validated and the whole candidate resampled on failure.
inline CubeDiagram random_boundary_cube(Rng& rng, std::uint32_t n, std::uint32_t k,
                                        std::size_t max_face_size) {
    for (int attempt = 0; attempt < 20000; ++attempt) {
        CubeDiagram cube;
        cube.k = k;
        cube.shape = CubeShape::boundary;
        auto faces = cube.required_faces();

        std::uniform_int_distribution<int> pool_size(0, 2);
        std::map<Face, std::vector<ElementId>> pools;
        ElementId next_id = 0;
        for (Face f : faces) {
            int size = pool_size(rng);
            for (int i = 0; i < size; ++i) pools[f].push_back(next_id++);
        }
        std::map<Face, std::vector<ElementId>> domains;
        bool too_big = false;
        for (Face f : faces) {
            std::vector<ElementId> d;
            for (Face sub : subfaces_of(f)) {
                const auto& p = pools[sub];
                d.insert(d.end(), p.begin(), p.end());
            }
            std::sort(d.begin(), d.end());
            if (d.size() > max_face_size) { too_big = true; break; }
            domains[f] = std::move(d);
        }
        if (too_big) continue;

        // minimal face containing an element: the pool it came from
        std::map<ElementId, Face> home_of;
        for (Face f : faces)
            for (ElementId id : pools[f]) home_of[id] = f;

        // one entry per distinct id tuple, drawn over the union of coordinate homes
        std::map<std::vector<ElementId>, TupleEntry> entries;
        double generic_prob = n == 1 ? 0.8 : 0.55;
        auto entry_for = [&](const std::vector<ElementId>& ids) {
            auto it = entries.find(ids);
            if (it != entries.end()) return it->second;
            Face home = 0;
            for (ElementId id : ids) home |= home_of[id];
            TupleEntry e = random_entry(rng, domains[home], ids[0], generic_prob);
            entries[ids] = e;
            return e;
        };

        bool valid = true;
        for (Face f : faces) {
            Structure s;
            s.family = Family::bkl;
            s.arity = n;
            s.elements = domains[f];
            if (!s.elements.empty()) {
                std::size_t count = 1;
                for (std::uint32_t i = 0; i < n; ++i) count *= s.elements.size();
                s.table.resize(count);
                std::vector<std::uint32_t> pos(n, 0);
                std::size_t rank = 0;
                for (;;) {
                    std::vector<ElementId> ids(n);
                    for (std::uint32_t p = 0; p < n; ++p) ids[p] = s.elements[pos[p]];
                    s.table[rank] = entry_for(ids);
                    ++rank;
                    if (!next_tuple(pos, s.elements.size())) break;
                }
            }
            if (!validate_bkl(s).ok()) { valid = false; break; }
            cube.faces[f] = std::move(s);
        }
        if (!valid) continue;
        for (Face t : faces)
            for (Face s : subfaces_of(t)) cube.maps[{s, t}] = ElementMap::identity(cube.at(s).elements);
        if (!validate_disjoint(cube).ok()) continue;
        return cube;
    }
    throw std::runtime_error("random boundary generation failed to converge");
}

/// Transport every face of a cube along fresh random ids, so the maps stop
/// being identities; exercises the id-independent code paths.
inline CubeDiagram shuffle_cube_ids(Rng& rng, const CubeDiagram& cube) {
    // assign each (face, element) a fresh id consistently through the maps:
    // derive the renaming per face from a renaming of the colimit-style classes;
    // with identity-inclusion cubes it is enough to rename the underlying ids.
    std::set<ElementId> all_ids;
    for (const auto& [f, s] : cube.faces)
        for (ElementId id : s.elements) all_ids.insert(id);
    std::vector<ElementId> ids(all_ids.begin(), all_ids.end());
    std::vector<ElementId> fresh(ids.size());
    ElementId base = ids.empty() ? 0 : (*all_ids.rbegin() + 1);
    for (std::size_t i = 0; i < fresh.size(); ++i) fresh[i] = base + static_cast<ElementId>(i);
    std::shuffle(fresh.begin(), fresh.end(), rng);
    ElementMap renaming;
    for (std::size_t i = 0; i < ids.size(); ++i) renaming.set(ids[i], fresh[i]);

    CubeDiagram out;
    out.k = cube.k;
    out.shape = cube.shape;
    for (const auto& [f, s] : cube.faces) out.faces[f] = rename_structure(s, renaming);
    for (const auto& [key, m] : cube.maps) {
        ElementMap nm;
        for (const auto& [src, dst] : m.pairs) nm.set(renaming.at(src), renaming.at(dst));
        out.maps[key] = std::move(nm);
    }
    return out;
}

}  // namespace cubeamalg::testing
