#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <cubeamalg/colimit.hpp>
#include <cubeamalg/core.hpp>
#include <cubeamalg/cube.hpp>
#include <cubeamalg/strategy.hpp>
#include <cubeamalg/structure.hpp>

namespace cubeamalg {

namespace detail {

/// Labels for the colimit domain, transported through the injections. Merged
/// elements carry equal label sets because the cube maps are label-preserving
/// embeddings; distinct classes colliding on a label set cannot be amalgamated
/// in the labeled class.
inline std::vector<LabelSet> transport_labels(const CubeDiagram& boundary, const SetColimit& col) {
    std::map<ElementId, LabelSet> assigned;
    for (const auto& [face, inj] : col.injections) {
        const Structure& s = boundary.at(face);
        for (std::size_t i = 0; i < s.elements.size(); ++i) {
            ElementId target = inj.at(s.elements[i]);
            auto [it, fresh] = assigned.emplace(target, s.labels[i]);
            if (!fresh && it->second != s.labels[i])
                throw internal_error("label transport conflict across identified elements");
        }
    }
    std::vector<LabelSet> out;
    out.reserve(col.domain.size());
    std::set<LabelSet> used;
    for (ElementId id : col.domain) {
        auto it = assigned.find(id);
        if (it == assigned.end())
            throw internal_error("colimit class without a representative label");
        if (!used.insert(it->second).second)
            throw refusal_error(
                "boundary faces carry colliding label sets; the labeled amalgam would violate A1");
        out.push_back(it->second);
    }
    return out;
}

}  // namespace detail

/// Extend a disjoint partial k-cube to a disjoint k-cube. The top structure
/// lives on the set colimit; tuples inside a face's image copy that face's
/// entry through the injection, and the remaining tuples take the family's
/// completion rule (for bkl: relation index N with function values enumerating
/// the whole domain in increasing id order).
inline CubeDiagram disjoint_amalgamate(const AmalgamationStrategy& strategy,
                                       const CubeDiagram& boundary, IdAllocator& alloc) {
    if (boundary.shape != CubeShape::boundary)
        throw refusal_error("amalgamation expects a boundary cube");
    if (boundary.k < 1) throw refusal_error("amalgamation needs k >= 1");
    if (auto kmax = strategy.max_amalgamation_k(); kmax && boundary.k > *kmax)
        throw refusal_error("amalgamation arity exceeded: the " + family_name(strategy.family) +
                            "(" + std::to_string(strategy.n) + ") family has disjoint k-amalgamation " +
                            "only for k <= " + std::to_string(*kmax) + ", got k = " +
                            std::to_string(boundary.k));
    {
        ValidationReport rep = validate_disjoint(boundary);
        if (!rep.ok())
            throw refusal_error("amalgamation input rejected: " + rep.summary());
        for (const auto& [f, s] : boundary.faces) {
            ValidationReport member = strategy.validate_member(s);
            if (!member.ok())
                throw refusal_error("face " + std::to_string(f) +
                                    " is not a valid family member: " + member.summary());
        }
    }

    SetColimit col = set_colimit(boundary, alloc);
    auto faces = boundary.required_faces();

    Structure top;
    top.family = strategy.family;
    top.arity = strategy.arity();
    top.label_universe = strategy.label_universe;
    top.elements = col.domain;

    // per-face inverse of the injection, for pulling entries back
    std::map<Face, std::map<ElementId, ElementId>> inverse;
    for (Face f : faces) {
        auto& inv = inverse[f];
        for (const auto& [src, dst] : col.injections.at(f).pairs) inv[dst] = src;
    }

    const std::size_t N = top.elements.size();
    if (N > 0) {
        std::size_t count = 1;
        for (std::uint32_t i = 0; i < top.arity; ++i) count *= N;
        top.table.resize(count);
        std::vector<std::uint32_t> pos(top.arity, 0);
        std::size_t rank = 0;
        std::vector<ElementId> ids(top.arity);
        for (;;) {
            for (std::uint32_t p = 0; p < top.arity; ++p) ids[p] = top.elements[pos[p]];
            std::optional<Face> home;
            for (Face f : faces) {
                const auto& inv = inverse[f];
                bool covered = true;
                for (ElementId id : ids)
                    if (!inv.count(id)) { covered = false; break; }
                if (covered) { home = f; break; }
            }
            if (home) {
                const Structure& src = boundary.at(*home);
                const auto& inv = inverse[*home];
                std::vector<std::uint32_t> src_idx(top.arity);
                for (std::uint32_t p = 0; p < top.arity; ++p)
                    src_idx[p] = *src.index_of(inv.at(ids[p]));
                const TupleEntry& e = src.entry(src_idx);
                TupleEntry out;
                out.rel_index = e.rel_index;
                out.fn_values.reserve(e.fn_values.size());
                const ElementMap& inj = col.injections.at(*home);
                for (ElementId v : e.fn_values) out.fn_values.push_back(inj.at(v));
                top.table[rank] = std::move(out);
            } else {
                TupleEntry out;
                switch (strategy.family) {
                    case Family::bkl:
                        out.rel_index = static_cast<std::uint32_t>(N - 1);
                        out.fn_values = top.elements;
                        break;
                    case Family::sets:
                        out.rel_index = 0;
                        out.fn_values = {ids[0]};
                        break;
                    case Family::graphs:
                        // no new cross edges
                        out.rel_index = 0;
                        out.fn_values = {ids[0]};
                        break;
                }
                top.table[rank] = std::move(out);
            }
            ++rank;
            if (!next_tuple(pos, N)) break;
        }
    }

    if (strategy.label_universe > 0) top.labels = detail::transport_labels(boundary, col);

    CubeDiagram out;
    out.k = boundary.k;
    out.shape = CubeShape::full;
    out.faces = boundary.faces;
    out.maps = boundary.maps;
    out.faces[out.top()] = std::move(top);
    for (Face f : faces) out.maps[{f, out.top()}] = col.injections.at(f);
    out.maps[{out.top(), out.top()}] = ElementMap::identity(out.faces[out.top()].elements);

    {
        ValidationReport rep = validate_disjoint(out);
        if (!rep.ok()) throw internal_error("amalgam failed validation: " + rep.summary());
        ValidationReport member = strategy.validate_member(out.at(out.top()));
        if (!member.ok())
            throw internal_error("amalgam top is not a valid family member: " + member.summary());
    }
    return out;
}

/// The completion recipe for the bkl family, with the strategy inferred from
/// the boundary's faces.
inline CubeDiagram complete_bkl(const CubeDiagram& boundary, std::uint32_t n, IdAllocator& alloc) {
    std::uint32_t label_universe = 0;
    for (const auto& [f, s] : boundary.faces) {
        label_universe = s.label_universe;
        break;
    }
    AmalgamationStrategy strategy{Family::bkl, n, label_universe};
    return disjoint_amalgamate(strategy, boundary, alloc);
}

/// Cube extension: given a disjoint full k-cube, a face ρ, and an embedding
/// h : A_ρ -> B, produce a disjoint k-cube with B at ρ and a disjoint embedding
/// from the input that is the identity on every face not above ρ. Faces above ρ
/// are rebuilt by closing partial (m+1)-cubes with disjoint amalgamation, by
/// induction on m = |τ \ ρ|.
inline std::pair<CubeDiagram, DisjointEmbedding> extend_cube(const AmalgamationStrategy& strategy,
                                                             const CubeDiagram& cube, Face rho,
                                                             const Structure& target,
                                                             const ElementMap& h,
                                                             IdAllocator& alloc) {
    if (cube.shape != CubeShape::full) throw refusal_error("cube extension expects a full cube");
    if (cube.k < 1) throw refusal_error("cube extension needs k >= 1");
    if (!face_subset(rho, cube.top())) throw input_error("face-range", "rho is not a face of the cube");
    if (auto kmax = strategy.max_amalgamation_k(); kmax && cube.k >= *kmax)
        throw refusal_error("cube extension for " + family_name(strategy.family) + "(" +
                            std::to_string(strategy.n) + ") requires k < " + std::to_string(*kmax) +
                            "; the induction closes partial (k+1)-cubes");
    {
        ValidationReport rep = validate_disjoint(cube);
        if (!rep.ok()) throw refusal_error("cube extension input rejected: " + rep.summary());
        ValidationReport member = strategy.validate_member(target);
        if (!member.ok())
            throw refusal_error("extension target is not a valid family member: " + member.summary());
        std::string why;
        if (!is_embedding(cube.at(rho), target, h, &why))
            throw refusal_error("h is not an embedding A_rho -> B: " + why);
        for (const auto& [f, s] : cube.faces) alloc.bump_past(s.elements.empty() ? 0 : s.elements.back());
        for (ElementId id : target.elements) alloc.bump_past(id);
    }

    CubeDiagram out;
    out.k = cube.k;
    out.shape = CubeShape::full;
    DisjointEmbedding emb;

    auto faces = cube.required_faces();

    // Faces not above rho are untouched.
    for (Face t : faces) {
        if (face_subset(rho, t)) continue;
        out.faces[t] = cube.at(t);
        emb.maps[t] = ElementMap::identity(cube.at(t).elements);
        for (Face s : subfaces_of(t)) out.maps[{s, t}] = cube.map_at(s, t);
    }

    // Base case tau = rho.
    out.faces[rho] = target;
    emb.maps[rho] = h;
    for (Face s : subfaces_of(rho)) {
        if (s == rho)
            out.maps[{rho, rho}] = ElementMap::identity(target.elements);
        else
            out.maps[{s, rho}] = compose(h, cube.map_at(s, rho));
    }

    // Faces above rho, by increasing |tau \ rho| then canonical order.
    std::vector<Face> above;
    for (Face t : faces)
        if (face_subset(rho, t) && t != rho) above.push_back(t);
    std::sort(above.begin(), above.end(), [&](Face a, Face b) {
        auto ma = face_popcount(a & ~rho), mb = face_popcount(b & ~rho);
        if (ma != mb) return ma < mb;
        return face_less(a, b);
    });

    for (Face tau : above) {
        Face diff = tau & ~rho;
        std::vector<std::uint32_t> bits;
        for (std::uint32_t i = 0; i < cube.k; ++i)
            if (diff >> i & 1) bits.push_back(i);
        const std::uint32_t m = static_cast<std::uint32_t>(bits.size());

        // Partial (m+1)-cube: faces without index m come from the input cube,
        // faces with index m from the part already rebuilt.
        auto a_face = [&](Face inner) {
            Face f = rho;
            for (std::uint32_t i = 0; i < m; ++i)
                if (inner >> i & 1) f |= (1u << bits[i]);
            return f;
        };
        CubeDiagram inner;
        inner.k = m + 1;
        inner.shape = CubeShape::boundary;
        const Face inner_top = full_face(m + 1);
        const Face m_bit = 1u << m;
        for (Face s : inner.required_faces()) {
            if (s & m_bit)
                inner.faces[s] = out.at(a_face(s & ~m_bit));
            else
                inner.faces[s] = cube.at(a_face(s));
        }
        for (Face t2 : inner.required_faces()) {
            for (Face s2 : subfaces_of(t2)) {
                ElementMap m2;
                const bool s_new = (s2 & m_bit) != 0;
                const bool t_new = (t2 & m_bit) != 0;
                if (!s_new && !t_new)
                    m2 = cube.map_at(a_face(s2), a_face(t2));
                else if (s_new && t_new)
                    m2 = out.map_at(a_face(s2 & ~m_bit), a_face(t2 & ~m_bit));
                else if (!s_new && t_new)
                    m2 = compose(emb.maps.at(a_face(t2 & ~m_bit)),
                                 cube.map_at(a_face(s2), a_face(t2 & ~m_bit)));
                else
                    throw internal_error("inner cube map from a rebuilt face to an input face");
                inner.maps[{s2, t2}] = std::move(m2);
            }
        }

        CubeDiagram closed = disjoint_amalgamate(strategy, inner, alloc);

        out.faces[tau] = closed.at(inner_top);
        emb.maps[tau] = closed.map_at(full_face(m), inner_top);  // F([m]) = A_tau
        for (Face s : subfaces_of(tau)) {
            if (face_subset(rho, s)) {
                Face inner_face = m_bit;
                for (std::uint32_t i = 0; i < m; ++i)
                    if (s >> bits[i] & 1) inner_face |= (1u << i);
                if (s == tau)
                    out.maps[{tau, tau}] = ElementMap::identity(out.faces[tau].elements);
                else
                    out.maps[{s, tau}] = closed.map_at(inner_face, inner_top);
            } else {
                out.maps[{s, tau}] = compose(emb.maps.at(tau), cube.map_at(s, tau));
            }
        }
    }

    {
        ValidationReport rep = validate_disjoint(out);
        if (!rep.ok()) throw internal_error("extended cube failed validation: " + rep.summary());
        ValidationReport erep = validate_disjoint_embedding(cube, out, emb);
        if (!erep.ok())
            throw internal_error("extension embedding failed validation: " + erep.summary());
    }
    return {std::move(out), std::move(emb)};
}

/// The finite content of the reducibility argument for n-cubes: any selection
/// x_i from the side images minus the opposite-face images generates the image
/// of the bottom face. Returns the first failing selection, if any.
inline std::optional<std::vector<ElementId>> empty_face_absorption_failure(const CubeDiagram& cube) {
    if (cube.shape != CubeShape::full)
        throw refusal_error("absorption check expects a full cube");
    const std::uint32_t n = cube.k;
    const Structure& top = cube.at(cube.top());
    std::vector<std::vector<ElementId>> choices(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto img_side = cube.image_in_top(1u << i);
        auto img_opp = cube.image_in_top(cube.top() & ~(1u << i));
        std::vector<ElementId> diff;
        std::set_difference(img_side.begin(), img_side.end(), img_opp.begin(), img_opp.end(),
                            std::back_inserter(diff));
        choices[i] = std::move(diff);
        if (choices[i].empty()) return std::nullopt;  // no admissible selection
    }
    auto bottom = cube.image_in_top(0);
    std::vector<std::size_t> pick(n, 0);
    for (;;) {
        std::vector<ElementId> xs(n);
        for (std::uint32_t i = 0; i < n; ++i) xs[i] = choices[i][pick[i]];
        auto generated = generated_substructure(top, xs);
        if (!std::includes(generated.begin(), generated.end(), bottom.begin(), bottom.end()))
            return xs;
        std::uint32_t p = n;
        bool advanced = false;
        while (p-- > 0) {
            if (++pick[p] < choices[p].size()) { advanced = true; break; }
            pick[p] = 0;
        }
        if (!advanced) break;
    }
    return std::nullopt;
}

}  // namespace cubeamalg
