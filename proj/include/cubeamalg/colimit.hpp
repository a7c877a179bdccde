#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include <cubeamalg/core.hpp>
#include <cubeamalg/cube.hpp>
#include <cubeamalg/embedding.hpp>

namespace cubeamalg {

namespace detail {

class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[a] = b;
    }

  private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

/// The colimit of a disjoint partial k-cube in the category of sets: the
/// disjoint union of the boundary faces with f^σ_τ(a) and f^σ_{τ'}(a)
/// identified. Top-face elements get fresh ids; each face's induced injection
/// into the quotient is recorded.
struct SetColimit {
    std::vector<ElementId> domain;          // fresh ids, strictly increasing
    std::map<Face, ElementMap> injections;  // per boundary face
};

inline SetColimit set_colimit(const CubeDiagram& boundary, IdAllocator& alloc) {
    if (boundary.shape != CubeShape::boundary)
        throw refusal_error("set colimit expects a boundary cube");
    auto faces = boundary.required_faces();

    // flat index for (face, element position)
    std::map<Face, std::size_t> base;
    std::size_t total = 0;
    for (Face f : faces) {
        base[f] = total;
        total += boundary.at(f).elements.size();
    }
    detail::UnionFind uf(total);

    for (Face t : faces) {
        for (Face s : subfaces_of(t)) {
            if (s == t) continue;
            const auto& from = boundary.at(s);
            const auto& m = boundary.map_at(s, t);
            const auto& to = boundary.at(t);
            for (std::size_t i = 0; i < from.elements.size(); ++i) {
                ElementId img = m.at(from.elements[i]);
                auto ti = to.index_of(img);
                if (!ti) throw input_error("dangling-id", "cube map lands outside its codomain");
                uf.unite(base[s] + i, base[t] + *ti);
            }
        }
    }

    // canonical class key: least (element id, face order) pair among members
    struct Key {
        ElementId id;
        std::size_t face_rank;
        bool operator<(const Key& o) const {
            return id != o.id ? id < o.id : face_rank < o.face_rank;
        }
    };
    std::map<std::size_t, Key> key_of_root;
    for (std::size_t fr = 0; fr < faces.size(); ++fr) {
        const auto& s = boundary.at(faces[fr]);
        for (std::size_t i = 0; i < s.elements.size(); ++i) {
            std::size_t root = uf.find(base[faces[fr]] + i);
            Key k{s.elements[i], fr};
            auto it = key_of_root.find(root);
            if (it == key_of_root.end() || k < it->second) key_of_root[root] = k;
        }
    }
    std::vector<std::pair<Key, std::size_t>> ordered;
    ordered.reserve(key_of_root.size());
    for (const auto& [root, key] : key_of_root) ordered.emplace_back(key, root);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    for (Face f : faces)
        for (ElementId id : boundary.at(f).elements) alloc.bump_past(id);

    SetColimit out;
    std::map<std::size_t, ElementId> fresh_of_root;
    for (const auto& [key, root] : ordered) {
        ElementId fid = alloc.fresh();
        fresh_of_root[root] = fid;
        out.domain.push_back(fid);
    }

    for (Face f : faces) {
        const auto& s = boundary.at(f);
        ElementMap inj;
        for (std::size_t i = 0; i < s.elements.size(); ++i)
            inj.set(s.elements[i], fresh_of_root[uf.find(base[f] + i)]);
        if (!inj.injective())
            throw internal_error("colimit injection is not injective; the input was not disjoint");
        out.injections[f] = std::move(inj);
    }
    return out;
}

}  // namespace cubeamalg
