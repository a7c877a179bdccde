#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <cubeamalg/amalgamation.hpp>
#include <cubeamalg/colimit.hpp>
#include <cubeamalg/core.hpp>
#include <cubeamalg/cube.hpp>
#include <cubeamalg/strategy.hpp>

namespace cubeamalg {

/// Outcome of refuting every completion of a partial (n+1)-cube.
struct CompletionRefutation {
    bool refuted = false;
    /// Colimit classes whose forced entries make them independent in every
    /// completion, of size n+1 (so B3 fails regardless of the free entries).
    std::vector<ElementId> forced_independent;
    /// Top sizes for which all tuple tables were literally enumerated.
    std::vector<std::size_t> sizes_exhausted;
    std::uint64_t tables_enumerated = 0;
    /// A valid completion, when one was found (the candidate is not a witness).
    std::optional<CubeDiagram> completion;
};

/// A partial (n+1)-cube none of whose completions up to the size cap is a valid
/// family member, plus the verification data.
struct FailureWitness {
    CubeDiagram boundary;
    std::uint32_t n = 1;
    std::size_t size_cap = 4;
    CompletionRefutation verification;
};

namespace detail {

/// Forced part of any completion's top: the colimit classes and the entries of
/// tuples covered by some boundary face's image. Every completion contains this
/// data verbatim (up to the colimit injection), by disjointness.
struct ForcedTop {
    std::vector<ElementId> domain;                       // colimit classes, sorted fresh ids
    std::map<std::vector<ElementId>, TupleEntry> entries;  // id tuple -> forced entry
};

inline ForcedTop forced_top(const CubeDiagram& boundary, std::uint32_t arity) {
    IdAllocator local;
    SetColimit col = set_colimit(boundary, local);
    ForcedTop out;
    out.domain = col.domain;
    for (Face f : boundary.required_faces()) {
        const Structure& s = boundary.at(f);
        if (s.elements.empty()) continue;
        const ElementMap& inj = col.injections.at(f);
        std::vector<std::uint32_t> pos(arity, 0);
        for (;;) {
            std::vector<ElementId> ids(arity);
            for (std::uint32_t p = 0; p < arity; ++p) ids[p] = inj.at(s.elements[pos[p]]);
            const TupleEntry& e = s.entry(pos);
            TupleEntry mapped;
            mapped.rel_index = e.rel_index;
            for (ElementId v : e.fn_values) mapped.fn_values.push_back(inj.at(v));
            auto [it, fresh] = out.entries.emplace(ids, mapped);
            if (!fresh && !(it->second == mapped))
                throw internal_error("boundary faces disagree on a shared tuple entry");
            if (!next_tuple(pos, s.elements.size())) break;
        }
    }
    return out;
}

/// Closure of the seed under forced entries only. Returns nullopt if the
/// computation would consult a tuple whose entry is not forced (then the
/// closure depends on the completion).
inline std::optional<std::vector<ElementId>> forced_closure(const ForcedTop& forced,
                                                            std::uint32_t arity,
                                                            std::vector<ElementId> seed) {
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    std::vector<ElementId> current = seed;
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<std::uint32_t> pos(arity, 0);
        if (current.empty()) break;
        for (;;) {
            std::vector<ElementId> ids(arity);
            for (std::uint32_t p = 0; p < arity; ++p) ids[p] = current[pos[p]];
            auto it = forced.entries.find(ids);
            if (it == forced.entries.end()) return std::nullopt;
            for (ElementId v : it->second.fn_values) {
                if (!std::binary_search(current.begin(), current.end(), v)) {
                    current.insert(std::lower_bound(current.begin(), current.end(), v), v);
                    grew = true;
                }
            }
            if (!next_tuple(pos, current.size())) break;
        }
    }
    return current;
}

/// Look for an (n+1)-subset of the colimit classes that is independent under
/// the forced entries alone; such a set is independent in every completion.
inline std::optional<std::vector<ElementId>> forced_independent_subset(const ForcedTop& forced,
                                                                       std::uint32_t arity,
                                                                       std::uint32_t set_size) {
    const auto& dom = forced.domain;
    if (dom.size() < set_size) return std::nullopt;
    // try subsets in lexicographic order; certify the first that works
    std::vector<std::size_t> idxs(set_size);
    std::vector<ElementId> out;
    auto try_all = [&](auto&& self, std::size_t depth, std::size_t start) -> bool {
        if (depth == set_size) {
            out.clear();
            for (auto p : idxs) out.push_back(dom[p]);
            for (std::size_t drop = 0; drop < out.size(); ++drop) {
                std::vector<ElementId> rest;
                for (std::size_t i = 0; i < out.size(); ++i)
                    if (i != drop) rest.push_back(out[i]);
                auto closure = forced_closure(forced, arity, rest);
                if (!closure) return false;
                if (std::binary_search(closure->begin(), closure->end(), out[drop])) return false;
            }
            return true;
        }
        for (std::size_t i = start; i < dom.size(); ++i) {
            idxs[depth] = i;
            if (self(self, depth + 1, i + 1)) return true;
        }
        return false;
    };
    if (try_all(try_all, 0, 0)) return out;
    return std::nullopt;
}

/// Literal enumeration of every completion at a given top size: forced entries
/// fixed, each free tuple ranging over relation indices < size with all value
/// tuples. Returns a valid completion's top if one exists. Consumes budget.
inline std::optional<Structure> enumerate_completions_at_size(
    const ForcedTop& forced, const AmalgamationStrategy& strategy, std::size_t top_size,
    std::uint64_t budget, std::uint64_t& consumed, bool& exhausted) {
    exhausted = false;
    const std::uint32_t arity = strategy.arity();
    Structure top;
    top.family = strategy.family;
    top.arity = arity;
    top.elements = forced.domain;
    ElementId next = forced.domain.empty() ? 0 : forced.domain.back() + 1;
    while (top.elements.size() < top_size) top.elements.push_back(next++);

    std::size_t count = 1;
    for (std::uint32_t i = 0; i < arity; ++i) count *= top.elements.size();
    top.table.resize(count);

    std::vector<std::size_t> free_ranks;
    {
        std::vector<std::uint32_t> pos(arity, 0);
        std::size_t rank = 0;
        for (;;) {
            std::vector<ElementId> ids(arity);
            for (std::uint32_t p = 0; p < arity; ++p) ids[p] = top.elements[pos[p]];
            auto it = forced.entries.find(ids);
            if (it != forced.entries.end())
                top.table[rank] = it->second;
            else
                free_ranks.push_back(rank);
            ++rank;
            if (!next_tuple(pos, top.elements.size())) break;
        }
    }

    // per free tuple: choices are (rel_index j < size, value tuple over the domain)
    const std::size_t m = top.elements.size();
    std::uint64_t per_tuple = 0;
    {
        std::uint64_t v = m;
        for (std::size_t j = 0; j < m; ++j) {
            per_tuple += v;
            if (per_tuple > budget) break;
            v *= m;
        }
    }
    auto decode = [&](std::uint64_t choice, std::size_t rank) {
        std::uint64_t v = m;
        std::uint32_t j = 0;
        while (choice >= v) {
            choice -= v;
            v *= m;
            ++j;
        }
        TupleEntry e;
        e.rel_index = j;
        e.fn_values.resize(j + 1);
        for (std::uint32_t i = j + 1; i-- > 0;) {
            e.fn_values[i] = top.elements[choice % m];
            choice /= m;
        }
        top.table[rank] = std::move(e);
    };

    // overall product; bail out to the certificate when it exceeds the budget
    long double total = 1;
    for (std::size_t i = 0; i < free_ranks.size(); ++i) {
        total *= static_cast<long double>(per_tuple);
        if (total > static_cast<long double>(budget)) return std::nullopt;
    }

    std::vector<std::uint64_t> odo(free_ranks.size(), 0);
    for (;;) {
        for (std::size_t i = 0; i < free_ranks.size(); ++i) decode(odo[i], free_ranks[i]);
        ++consumed;
        if (consumed > budget) return std::nullopt;
        if (!detail::find_independent_set(top, strategy.n + 1)) {
            exhausted = false;
            return top;  // a valid completion: B1/B2 hold by construction, B3 passed
        }
        std::size_t p = free_ranks.size();
        bool advanced = false;
        while (p-- > 0) {
            if (++odo[p] < per_tuple) { advanced = true; break; }
            odo[p] = 0;
        }
        if (!advanced) break;
        if (free_ranks.empty()) break;
    }
    exhausted = true;
    return std::nullopt;
}

}  // namespace detail

/// Check that no completion of the partial cube up to the size cap is a valid
/// member: first by the forced-independence certificate (which covers every
/// size), then by literal enumeration of tuple tables where the budget allows.
inline CompletionRefutation refute_completions(const AmalgamationStrategy& strategy,
                                               const CubeDiagram& boundary, std::size_t size_cap,
                                               std::uint64_t budget = 2'000'000) {
    CompletionRefutation out;
    detail::ForcedTop forced = detail::forced_top(boundary, strategy.arity());
    if (forced.domain.size() > size_cap) {
        out.refuted = true;  // even the colimit exceeds the cap
        return out;
    }
    auto cert = detail::forced_independent_subset(forced, strategy.arity(), strategy.n + 1);
    if (cert) {
        out.refuted = true;
        out.forced_independent = *cert;
    }
    for (std::size_t m = forced.domain.size(); m <= size_cap; ++m) {
        bool exhausted = false;
        auto completion =
            detail::enumerate_completions_at_size(forced, strategy, m, budget,
                                                  out.tables_enumerated, exhausted);
        if (completion) {
            out.refuted = false;
            out.forced_independent.clear();
            CubeDiagram full = boundary;
            full.shape = CubeShape::full;
            // assemble the found completion for inspection
            IdAllocator local;
            SetColimit col = set_colimit(boundary, local);
            full.faces[full.top()] = *completion;
            for (Face f : boundary.required_faces()) full.maps[{f, full.top()}] = col.injections.at(f);
            full.maps[{full.top(), full.top()}] = ElementMap::identity(completion->elements);
            out.completion = std::move(full);
            return out;
        }
        if (exhausted) out.sizes_exhausted.push_back(m);
    }
    if (!out.forced_independent.empty()) return out;
    // no certificate and not every size exhausted: cannot assert refutation
    std::vector<std::size_t> all_sizes;
    for (std::size_t m = forced.domain.size(); m <= size_cap; ++m) all_sizes.push_back(m);
    out.refuted = (out.sizes_exhausted == all_sizes);
    return out;
}

/// Search for a disjoint partial (n+1)-cube in the bkl(n) family none of whose
/// completions up to the size cap satisfies B3. Candidates use singleton side
/// faces and enumerate the cross-tuple entries of the higher boundary faces.
inline std::optional<FailureWitness> search_failure_witness(const AmalgamationStrategy& strategy,
                                                            std::size_t size_cap) {
    if (strategy.family != Family::bkl)
        throw refusal_error("the " + family_name(strategy.family) +
                            " family amalgamates at every k; no failure witness exists");
    if (strategy.n > 2)
        throw refusal_error("failure witness search runs in exhaustive mode for n <= 2 only");
    if (strategy.label_universe != 0)
        throw refusal_error("failure witness search works on the unlabeled family");
    const std::uint32_t n = strategy.n;
    const std::uint32_t k = n + 1;

    // Fixed element ids: x_i = i for i in [k]. Faces sigma get domain {i : i in sigma}.
    // Diagonal-style tuples whose coordinate set lies in a singleton face are
    // forced to the only entry with rel index < 1; entries of tuples spanning
    // two or more x_i are the search space.
    std::vector<std::vector<ElementId>> tuples;  // id tuples over {0..k-1}, arity n
    {
        std::vector<std::uint32_t> pos(n, 0);
        for (;;) {
            std::vector<ElementId> ids(n);
            for (std::uint32_t p = 0; p < n; ++p) ids[p] = pos[p];
            tuples.push_back(ids);
            if (!next_tuple(pos, k)) break;
        }
    }
    auto coord_set = [&](const std::vector<ElementId>& t) {
        Face f = 0;
        for (ElementId id : t) f |= (1u << id);
        return f;
    };
    std::vector<std::size_t> free_tuples;
    for (std::size_t i = 0; i < tuples.size(); ++i)
        if (face_popcount(coord_set(tuples[i])) >= 2) free_tuples.push_back(i);

    // choices per free tuple: rel index j < |coordinate set|, values within it
    auto choices_of = [&](std::size_t ti) {
        std::vector<ElementId> dom;
        Face cs = coord_set(tuples[ti]);
        for (std::uint32_t i = 0; i < k; ++i)
            if (cs >> i & 1) dom.push_back(i);
        std::vector<TupleEntry> out;
        for (std::uint32_t j = 0; j < dom.size(); ++j) {
            std::vector<std::uint32_t> pos(j + 1, 0);
            for (;;) {
                TupleEntry e;
                e.rel_index = j;
                for (std::uint32_t p = 0; p <= j; ++p) e.fn_values.push_back(dom[pos[p]]);
                out.push_back(e);
                if (!next_tuple(pos, dom.size())) break;
            }
        }
        return out;
    };
    std::vector<std::vector<TupleEntry>> choice_table;
    for (auto ti : free_tuples) choice_table.push_back(choices_of(ti));

    std::map<std::vector<ElementId>, TupleEntry> assignment;
    for (const auto& t : tuples) {
        if (face_popcount(coord_set(t)) == 1) {
            TupleEntry e;
            e.rel_index = 0;
            e.fn_values = {t[0]};
            assignment[t] = e;
        }
    }

    auto build_boundary = [&]() {
        CubeDiagram b;
        b.k = k;
        b.shape = CubeShape::boundary;
        for (Face f : b.required_faces()) {
            Structure s;
            s.family = Family::bkl;
            s.arity = n;
            for (std::uint32_t i = 0; i < k; ++i)
                if (f >> i & 1) s.elements.push_back(i);
            if (!s.elements.empty()) {
                std::size_t count = 1;
                for (std::uint32_t i = 0; i < n; ++i) count *= s.elements.size();
                s.table.resize(count);
                std::vector<std::uint32_t> pos(n, 0);
                std::size_t rank = 0;
                for (;;) {
                    std::vector<ElementId> ids(n);
                    for (std::uint32_t p = 0; p < n; ++p) ids[p] = s.elements[pos[p]];
                    s.table[rank] = assignment.at(ids);
                    ++rank;
                    if (!next_tuple(pos, s.elements.size())) break;
                }
            }
            b.faces[f] = std::move(s);
        }
        for (Face t : b.required_faces())
            for (Face s : subfaces_of(t)) b.maps[{s, t}] = ElementMap::identity(b.at(s).elements);
        return b;
    };

    std::vector<std::size_t> odo(free_tuples.size(), 0);
    for (;;) {
        for (std::size_t i = 0; i < free_tuples.size(); ++i)
            assignment[tuples[free_tuples[i]]] = choice_table[i][odo[i]];
        CubeDiagram boundary = build_boundary();
        bool faces_valid = true;
        AmalgamationStrategy unlabeled{Family::bkl, n, 0};
        for (const auto& [f, s] : boundary.faces)
            if (!unlabeled.validate_member(s).ok()) { faces_valid = false; break; }
        if (faces_valid && validate_disjoint(boundary).ok()) {
            CompletionRefutation v = refute_completions(unlabeled, boundary, size_cap);
            if (v.refuted) {
                FailureWitness w;
                w.boundary = std::move(boundary);
                w.n = n;
                w.size_cap = size_cap;
                w.verification = std::move(v);
                return w;
            }
        }
        std::size_t p = free_tuples.size();
        bool advanced = false;
        while (p-- > 0) {
            if (++odo[p] < choice_table[p].size()) { advanced = true; break; }
            odo[p] = 0;
        }
        if (!advanced) break;
    }
    return std::nullopt;
}

}  // namespace cubeamalg
