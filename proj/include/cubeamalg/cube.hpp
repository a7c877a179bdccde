#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <cubeamalg/core.hpp>
#include <cubeamalg/embedding.hpp>
#include <cubeamalg/structure.hpp>
#include <cubeamalg/validation.hpp>

namespace cubeamalg {

enum class CubeShape { full, boundary };

/// A functor from the face poset of the combinatorial k-cube (or its boundary)
/// to structures and embeddings: structures A_σ per face and maps f^σ_τ per
/// inclusion σ ⊆ τ (identity maps stored explicitly).
struct CubeDiagram {
    std::uint32_t k = 0;
    CubeShape shape = CubeShape::full;
    std::map<Face, Structure> faces;
    std::map<std::pair<Face, Face>, ElementMap> maps;

    Face top() const { return full_face(k); }

    bool has_face(Face f) const { return faces.count(f) != 0; }

    const Structure& at(Face f) const {
        auto it = faces.find(f);
        if (it == faces.end())
            throw input_error("missing-face", "face " + std::to_string(f) + " is absent");
        return it->second;
    }

    const ElementMap& map_at(Face from, Face to) const {
        auto it = maps.find({from, to});
        if (it == maps.end())
            throw input_error("missing-map", "map " + std::to_string(from) + " -> " +
                                                 std::to_string(to) + " is absent");
        return it->second;
    }

    /// Faces the declared shape requires, in canonical order.
    std::vector<Face> required_faces() const {
        auto fs = all_faces(k);
        if (shape == CubeShape::boundary) {
            fs.erase(std::remove(fs.begin(), fs.end(), top()), fs.end());
        }
        return fs;
    }

    /// f^σ_{[k]}(A_σ) as a sorted id list. Full cubes only.
    std::vector<ElementId> image_in_top(Face sigma) const {
        const ElementMap& m = map_at(sigma, top());
        return m.image();
    }

    friend bool operator==(const CubeDiagram&, const CubeDiagram&) = default;
};

/// Empty k-cube for the strategy's signature (every face the empty structure).
inline CubeDiagram make_empty_cube(std::uint32_t k, CubeShape shape, const Structure& prototype) {
    CubeDiagram c;
    c.k = k;
    c.shape = shape;
    Structure e;
    e.family = prototype.family;
    e.arity = prototype.arity;
    e.label_universe = prototype.label_universe;
    for (Face f : c.required_faces()) c.faces[f] = e;
    for (Face t : c.required_faces())
        for (Face s : subfaces_of(t)) c.maps[{s, t}] = ElementMap{};
    return c;
}

/// Identity and functoriality conditions, plus per-map embedding certificates.
inline ValidationReport validate_cube(const CubeDiagram& c) {
    ValidationReport rep;
    if (c.k > max_cube_dimension) {
        rep.add({"dimension", Severity::structural, "cube dimension exceeds the supported bound", {}, {}});
        return rep;
    }
    auto required = c.required_faces();
    for (Face f : required) {
        if (!c.has_face(f)) {
            rep.add({"missing-face", Severity::structural,
                     "face required by the declared shape is absent", {}, {f}});
        }
    }
    if (!rep.ok()) return rep;
    for (const auto& [f, s] : c.faces) {
        if (std::find(required.begin(), required.end(), f) == required.end())
            rep.add({"extra-face", Severity::structural, "face outside the declared shape", {}, {f}});
        auto sr = validate_structural(s);
        for (auto& v : sr.violations) {
            v.faces.push_back(f);
            rep.add(v);
        }
    }
    if (!rep.ok() || c.faces.empty()) return rep;
    const Structure& first = c.faces.begin()->second;
    for (const auto& [f, s] : c.faces) {
        if (s.family != first.family || s.arity != first.arity ||
            s.label_universe != first.label_universe)
            rep.add({"face-signature", Severity::structural,
                     "faces must share family, arity, and label universe", {}, {f}});
    }
    if (!rep.ok()) return rep;
    for (Face t : required) {
        for (Face s : subfaces_of(t)) {
            if (!c.maps.count({s, t})) {
                rep.add({"missing-map", Severity::structural, "map for an inclusion is absent", {}, {s, t}});
                continue;
            }
            // the self map is checked against the identity below, which already
            // certifies it as an embedding
            if (s == t) continue;
            std::string why;
            if (!is_embedding(c.at(s), c.at(t), c.map_at(s, t), &why))
                rep.add({"map-not-embedding", Severity::axiom, why, {}, {s, t}});
        }
    }
    if (!rep.ok()) return rep;
    for (Face f : required) {
        const ElementMap& idm = c.map_at(f, f);
        if (!(idm == ElementMap::identity(c.at(f).elements)))
            rep.add({"identity", Severity::axiom, "f^σ_σ is not the identity", {}, {f}});
    }
    for (Face r : required) {
        for (Face t : subfaces_of(r)) {
            for (Face s : subfaces_of(t)) {
                const ElementMap composed = compose(c.map_at(t, r), c.map_at(s, t));
                if (!(composed == c.map_at(s, r)))
                    rep.add({"functoriality", Severity::axiom,
                             "f^τ_ρ ∘ f^σ_τ differs from f^σ_ρ", {}, {s, t, r}});
            }
        }
    }
    return rep;
}

namespace detail {

inline std::vector<ElementId> sorted_intersection(const std::vector<ElementId>& a,
                                                  const std::vector<ElementId>& b) {
    std::vector<ElementId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace detail

/// Disjointness: images over the union face intersect exactly in the image of
/// the intersection face. For boundary cubes only pairs with σ∪τ a proper
/// subset of [k] are constrained.
inline ValidationReport validate_disjoint(const CubeDiagram& c) {
    ValidationReport rep = validate_cube(c);
    if (!rep.ok()) return rep;
    auto required = c.required_faces();
    for (Face s : required) {
        for (Face t : required) {
            if (t < s) continue;  // symmetric condition, unordered pairs suffice
            Face u = s | t;
            if (c.shape == CubeShape::boundary && u == c.top()) continue;
            const auto img_s = c.map_at(s, u).image();
            const auto img_t = c.map_at(t, u).image();
            const auto img_meet = c.map_at(s & t, u).image();
            if (detail::sorted_intersection(img_s, img_t) != img_meet)
                rep.add({"disjointness", Severity::axiom,
                         "images over the union face do not meet in the intersection face's image",
                         {},
                         {s, t}});
        }
    }
    return rep;
}

/// First pair (σ, τ) with σ ⊄ τ whose image in the top face is contained in
/// τ's image, in canonical face order; absent means irreducible. Full cubes only.
inline std::optional<std::pair<Face, Face>> is_reducible(const CubeDiagram& c) {
    if (c.shape != CubeShape::full)
        throw refusal_error("reducibility needs the top face; got a boundary cube");
    auto faces = c.required_faces();
    for (Face s : faces) {
        const auto img_s = c.image_in_top(s);
        for (Face t : faces) {
            if (face_subset(s, t)) continue;
            const auto img_t = c.image_in_top(t);
            if (std::includes(img_t.begin(), img_t.end(), img_s.begin(), img_s.end()))
                return std::make_pair(s, t);
        }
    }
    return std::nullopt;
}

/// A family of embeddings h_σ : A_σ -> B_σ between two cubes of the same k and
/// shape, subject to naturality and mixed disjointness.
struct DisjointEmbedding {
    std::map<Face, ElementMap> maps;

    friend bool operator==(const DisjointEmbedding&, const DisjointEmbedding&) = default;
};

inline ValidationReport validate_disjoint_embedding(const CubeDiagram& src,
                                                    const CubeDiagram& dst,
                                                    const DisjointEmbedding& emb) {
    ValidationReport rep;
    if (src.k != dst.k || src.shape != dst.shape) {
        rep.add({"shape-mismatch", Severity::structural,
                 "source and target cubes must have equal dimension and shape", {}, {}});
        return rep;
    }
    auto required = src.required_faces();
    for (Face f : required) {
        auto it = emb.maps.find(f);
        if (it == emb.maps.end()) {
            rep.add({"missing-map", Severity::structural, "per-face embedding absent", {}, {f}});
            continue;
        }
        std::string why;
        if (!is_embedding(src.at(f), dst.at(f), it->second, &why))
            rep.add({"map-not-embedding", Severity::axiom, why, {}, {f}});
    }
    if (!rep.ok()) return rep;
    for (Face t : required) {
        for (Face s : subfaces_of(t)) {
            const ElementMap lhs = compose(emb.maps.at(t), src.map_at(s, t));
            const ElementMap rhs = compose(dst.map_at(s, t), emb.maps.at(s));
            if (!(lhs == rhs))
                rep.add({"naturality", Severity::axiom,
                         "h_τ ∘ f^σ_τ differs from g^σ_τ ∘ h_σ", {}, {s, t}});
        }
    }
    for (Face s : required) {
        for (Face t : required) {
            Face u = s | t;
            if (src.shape == CubeShape::boundary && u == src.top()) continue;
            const auto lhs_a = compose(emb.maps.at(u), src.map_at(s, u)).image();
            const auto rhs_b = dst.map_at(t, u).image();
            const auto meet = compose(emb.maps.at(u), src.map_at(s & t, u)).image();
            if (detail::sorted_intersection(lhs_a, rhs_b) != meet)
                rep.add({"mixed-disjointness", Severity::axiom,
                         "(h ∘ f^σ)(A_σ) ∩ g^τ(B_τ) differs from (h ∘ f^{σ∩τ})(A_{σ∩τ})",
                         {},
                         {s, t}});
        }
    }
    return rep;
}

/// Drop the top face; the boundary restriction of a full cube.
inline CubeDiagram boundary_of(const CubeDiagram& c) {
    if (c.shape != CubeShape::full) throw refusal_error("boundary restriction needs a full cube");
    CubeDiagram out;
    out.k = c.k;
    out.shape = CubeShape::boundary;
    Face t = c.top();
    for (const auto& [f, s] : c.faces)
        if (f != t) out.faces.emplace(f, s);
    for (const auto& [key, m] : c.maps)
        if (key.first != t && key.second != t) out.maps.emplace(key, m);
    return out;
}

/// For labeled cubes: embedding existence between faces is equivalent to image
/// containment in the top face (labeled rigidity makes diagrams commute).
/// Returns the first face pair breaking the equivalence, if any.
inline std::optional<std::pair<Face, Face>> labeled_containment_mismatch(const CubeDiagram& c) {
    if (c.shape != CubeShape::full) throw refusal_error("containment check needs a full cube");
    auto faces = c.required_faces();
    for (Face s : faces) {
        const auto img_s = c.image_in_top(s);
        for (Face t : faces) {
            if (s == t) continue;
            const auto img_t = c.image_in_top(t);
            bool contained = std::includes(img_t.begin(), img_t.end(), img_s.begin(), img_s.end());
            bool embeds = embedding_exists(c.at(s), c.at(t));
            if (contained != embeds) return std::make_pair(s, t);
        }
    }
    return std::nullopt;
}

}  // namespace cubeamalg
