#pragma once

// Hand-built fixture structures shared across the suites.

#include <vector>

#include <cubeamalg/cube.hpp>
#include <cubeamalg/structure.hpp>

namespace cubeamalg::testing {

/// One-element bkl structure with the self entry (relation 0, s_0 = the element).
inline Structure bkl_singleton(std::uint32_t n, ElementId id) {
    Structure s;
    s.family = Family::bkl;
    s.arity = n;
    s.elements = {id};
    s.table.resize(1);
    s.table[0].rel_index = 0;
    s.table[0].fn_values = {id};
    return s;
}

inline Structure bkl_empty(std::uint32_t n) {
    Structure s;
    s.family = Family::bkl;
    s.arity = n;
    return s;
}

/// Two-element n=1 structure where each element only generates itself
/// (the canonical B3 violation).
inline Structure bkl1_two_loops() {
    Structure s;
    s.family = Family::bkl;
    s.arity = 1;
    s.elements = {0, 1};
    s.table.resize(2);
    s.table[0] = {0, {0}};
    s.table[1] = {0, {1}};
    return s;
}

/// Boundary 2-cube with empty base and singleton sides {a}, {b}.
inline CubeDiagram two_singleton_boundary(std::uint32_t n, ElementId a = 0, ElementId b = 1) {
    CubeDiagram boundary;
    boundary.k = 2;
    boundary.shape = CubeShape::boundary;
    boundary.faces[0b00] = bkl_empty(n);
    boundary.faces[0b01] = bkl_singleton(n, a);
    boundary.faces[0b10] = bkl_singleton(n, b);
    for (Face t : boundary.required_faces())
        for (Face s : subfaces_of(t))
            boundary.maps[{s, t}] = ElementMap::identity(boundary.at(s).elements);
    return boundary;
}

/// Labeled set with the given label sets, elements 0..m-1.
inline Structure labeled_set(std::uint32_t universe, const std::vector<LabelSet>& labels) {
    Structure s;
    s.family = Family::sets;
    s.arity = 1;
    s.label_universe = universe;
    for (std::size_t i = 0; i < labels.size(); ++i) s.elements.push_back(static_cast<ElementId>(i));
    s.table.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) s.table[i] = {0, {static_cast<ElementId>(i)}};
    s.labels = labels;
    return s;
}

/// Graph on elements 0..m-1 with the given (symmetric) edge list.
inline Structure graph_structure(std::size_t m, const std::vector<std::pair<ElementId, ElementId>>& edges) {
    Structure s;
    s.family = Family::graphs;
    s.arity = 2;
    for (std::size_t i = 0; i < m; ++i) s.elements.push_back(static_cast<ElementId>(i));
    s.table.resize(m * m);
    std::vector<std::uint32_t> pos(2, 0);
    std::size_t rank = 0;
    if (m > 0) {
        for (;;) {
            ElementId u = s.elements[pos[0]], v = s.elements[pos[1]];
            bool edge = false;
            for (auto [a, b] : edges)
                if ((a == u && b == v) || (a == v && b == u)) edge = true;
            s.table[rank].rel_index = edge ? 1 : 0;
            s.table[rank].fn_values.assign(edge ? 2 : 1, u);
            ++rank;
            if (!next_tuple(pos, m)) break;
        }
    }
    return s;
}

}  // namespace cubeamalg::testing
